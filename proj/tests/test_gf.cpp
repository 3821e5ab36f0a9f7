#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <tuple>
#include <vector>

#include "boxlb/gf.hpp"
#include "oracles.hpp"

using namespace boxlb;

namespace {

const std::vector<std::pair<std::uint32_t, std::uint32_t>> kSmallFields = {
    {2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}, {11, 1}, {13, 1}, {2, 4}};

Vector vec(std::initializer_list<std::uint32_t> xs) {
  Vector v;
  for (auto x : xs) v.push_back(Scalar{x});
  return v;
}

}  // namespace

TEST(Field, PrimeFields) {
  auto f2 = Field::make(2, 1);
  EXPECT_EQ(f2.order(), 2u);
  EXPECT_EQ(f2.modulus(), (Polynomial{0, 1}));
  auto f3 = Field::make(3, 1);
  EXPECT_EQ(f3.order(), 3u);
  for (std::uint32_t i = 0; i < 3; ++i) EXPECT_EQ(f3.element(i).value, i);
}

TEST(Field, Gf4WithGivenModulus) {
  auto f = Field::make(2, 2, Polynomial{1, 1, 1});
  EXPECT_EQ(f.order(), 4u);
  const std::uint32_t x_coeffs[] = {0, 1};
  const std::uint32_t x1_coeffs[] = {1, 1};
  const Scalar x = f.from_coefficients(x_coeffs);
  const Scalar x1 = f.from_coefficients(x1_coeffs);
  EXPECT_EQ(f.mul(x, x1), f.one());
}

TEST(Field, DefaultModulusIsSmallestIrreducible) {
  EXPECT_EQ(default_modulus(2, 2), (Polynomial{1, 1, 1}));
  EXPECT_EQ(default_modulus(2, 3), (Polynomial{1, 1, 0, 1}));
  EXPECT_EQ(default_modulus(3, 2), (Polynomial{1, 0, 1}));
  for (auto [p, k] : kSmallFields) {
    if (k == 1) continue;
    const auto m = default_modulus(p, k);
    EXPECT_TRUE(oracle::irreducible_by_division(m, p));
    // No smaller monic degree-k polynomial is irreducible.
    std::uint64_t code = 0;
    for (std::size_t i = k; i-- > 0;) code = code * p + m[i];
    for (std::uint64_t c = 0; c < code; ++c) {
      Polynomial cand(k + 1, 0);
      cand[k] = 1;
      std::uint64_t rest = c;
      for (std::uint32_t i = 0; i < k; ++i) {
        cand[i] = rest % p;
        rest /= p;
      }
      EXPECT_FALSE(oracle::irreducible_by_division(cand, p));
    }
  }
}

TEST(Field, Rejections) {
  EXPECT_THROW(Field::make(4, 1), FieldError);
  EXPECT_THROW(Field::make(1, 1), FieldError);
  EXPECT_THROW(Field::make(2, 0), FieldError);
  EXPECT_THROW(Field::make(2, 2, Polynomial{1, 0, 1}), FieldError);  // (x+1)^2
  EXPECT_THROW(Field::make(2, 2, Polynomial{1, 1}), FieldError);
  EXPECT_THROW(Field::make(2, 2, Polynomial{1, 1, 2}), FieldError);
  EXPECT_THROW(Field::make(2, 17), FieldError);
}

TEST(Field, ScalarArithExamples) {
  auto f5 = Field::make(5, 1);
  EXPECT_EQ(scalar_arith(f5, ScalarOp::add, Scalar{3}, Scalar{4}), Scalar{2});
  EXPECT_EQ(scalar_arith(f5, ScalarOp::inv, Scalar{3}), Scalar{2});
  for (auto [p, k] : kSmallFields) {
    auto f = Field::make(p, k);
    for (std::uint32_t a = 0; a < f.order(); ++a) {
      EXPECT_EQ(scalar_arith(f, ScalarOp::mul, Scalar{0}, Scalar{a}), f.zero());
    }
  }
  EXPECT_THROW(scalar_arith(f5, ScalarOp::inv, Scalar{0}), FieldError);
  EXPECT_THROW(scalar_arith(f5, ScalarOp::add, Scalar{3}), FieldError);
  EXPECT_THROW(scalar_arith(f5, ScalarOp::add, Scalar{5}, Scalar{1}), FieldError);
}

TEST(Field, MatchesPolynomialOracle) {
  for (auto [p, k] : kSmallFields) {
    auto f = Field::make(p, k);
    const std::uint32_t q = f.order();
    for (std::uint32_t a = 0; a < q; ++a) {
      for (std::uint32_t b = 0; b < q; ++b) {
        EXPECT_EQ(f.add(Scalar{a}, Scalar{b}).value, oracle::poly_add(a, b, p, k));
        EXPECT_EQ(f.mul(Scalar{a}, Scalar{b}).value,
                  oracle::poly_mulmod(a, b, p, f.modulus()));
      }
    }
  }
}

TEST(Field, AxiomsExhaustive) {
  for (auto [p, k] : kSmallFields) {
    auto f = Field::make(p, k);
    const std::uint32_t q = f.order();
    SCOPED_TRACE(f.describe());
    for (std::uint32_t a = 0; a < q; ++a) {
      const Scalar A{a};
      EXPECT_EQ(f.add(A, f.neg(A)), f.zero());
      EXPECT_EQ(f.add(A, f.zero()), A);
      EXPECT_EQ(f.mul(A, f.one()), A);
      if (a) EXPECT_EQ(f.mul(A, f.inv(A)), f.one());
      for (std::uint32_t b = 0; b < q; ++b) {
        const Scalar B{b};
        EXPECT_EQ(f.add(A, B), f.add(B, A));
        EXPECT_EQ(f.mul(A, B), f.mul(B, A));
        EXPECT_EQ(f.sub(f.add(A, B), B), A);
        for (std::uint32_t c = 0; c < q; ++c) {
          const Scalar C{c};
          ASSERT_EQ(f.add(f.add(A, B), C), f.add(A, f.add(B, C)));
          ASSERT_EQ(f.mul(f.mul(A, B), C), f.mul(A, f.mul(B, C)));
          ASSERT_EQ(f.mul(A, f.add(B, C)), f.add(f.mul(A, B), f.mul(A, C)));
        }
      }
    }
  }
}

TEST(Field, LargeExtensionWithoutAddTable) {
  auto f = Field::make(2, 10);
  EXPECT_EQ(f.order(), 1024u);
  for (std::uint32_t a = 1; a < f.order(); a += 37) {
    EXPECT_EQ(f.mul(Scalar{a}, f.inv(Scalar{a})), f.one());
    EXPECT_EQ(f.add(Scalar{a}, Scalar{a}), f.zero());
    EXPECT_EQ(f.add(Scalar{a}, Scalar{5}).value, oracle::poly_add(a, 5, 2, 10));
  }
}

TEST(Vectors, IndependenceExamples) {
  auto f2 = Field::make(2, 1);
  auto f5 = Field::make(5, 1);
  EXPECT_TRUE(linearly_independent(f2, vec({1, 0}), vec({0, 1})));
  EXPECT_FALSE(linearly_independent(f5, vec({1, 2}), vec({2, 4})));
  EXPECT_FALSE(linearly_independent(f5, vec({0, 0}), vec({1, 3})));
  EXPECT_THROW(linearly_independent(f5, vec({0, 1}), vec({1, 3, 1})), FieldError);
}

TEST(Vectors, IndependenceMatchesBruteForce) {
  const std::vector<std::tuple<std::uint32_t, std::uint32_t, std::size_t>> cases = {
      {2, 1, 2}, {2, 1, 3}, {2, 1, 4}, {2, 1, 6}, {3, 1, 2}, {3, 1, 3}, {3, 1, 4},
      {2, 2, 2}, {2, 2, 3}, {5, 1, 2}, {7, 1, 2}, {2, 3, 2}, {3, 2, 2}};
  for (auto [p, k, s] : cases) {
    auto f = Field::make(p, k);
    VectorSpace space(f, s);
    ASSERT_LE(space.size(), 81u);
    for (Point a = 0; a < space.size(); ++a) {
      for (Point b = 0; b < space.size(); ++b) {
        const Vector v = space.unpack(a), w = space.unpack(b);
        const bool expected = oracle::independent_by_scan(f, v, w);
        ASSERT_EQ(linearly_independent(f, v, w), expected);
        ASSERT_EQ(space.independent(a, b), expected);
      }
    }
  }
}

TEST(Lines, Examples) {
  auto f3 = Field::make(3, 1);
  const auto line = affine_line_through(f3, vec({0, 0}), vec({1, 1}));
  const auto pts = line_points(f3, line);
  EXPECT_EQ(std::set<Vector>(pts.begin(), pts.end()),
            (std::set<Vector>{vec({0, 0}), vec({1, 1}), vec({2, 2})}));
  EXPECT_EQ(affine_line_through(f3, vec({1, 1}), vec({2, 2})),
            affine_line_through(f3, vec({0, 0}), vec({2, 2})));

  auto f2 = Field::make(2, 1);
  const auto l2 = line_points(f2, affine_line_through(f2, vec({0, 1}), vec({1, 1})));
  EXPECT_EQ(std::set<Vector>(l2.begin(), l2.end()), (std::set<Vector>{vec({0, 1}), vec({1, 1})}));
  EXPECT_THROW(affine_line_through(f3, vec({1, 2}), vec({1, 2})), FieldError);
}

TEST(Lines, CanonicalFormForEveryPair) {
  for (auto [p, k, s] : std::vector<std::tuple<std::uint32_t, std::uint32_t, std::size_t>>{
           {2, 1, 3}, {3, 1, 2}, {2, 2, 2}, {5, 1, 2}, {3, 1, 3}}) {
    auto f = Field::make(p, k);
    VectorSpace space(f, s);
    for (Point a = 0; a < space.size(); ++a) {
      for (Point b = 0; b < space.size(); ++b) {
        if (a == b) continue;
        const Vector va = space.unpack(a), vb = space.unpack(b);
        const auto line = affine_line_through(f, va, vb);
        const auto pts = line_points(f, line);
        ASSERT_EQ(pts.size(), f.order());
        const auto expected = oracle::line_by_enumeration(f, va, vb);
        ASSERT_EQ(std::set<Vector>(pts.begin(), pts.end()), expected);
        EXPECT_EQ(line.base, *expected.begin());
        // Any other distinct pair on the line gives the same object.
        for (const auto& x : pts) {
          for (const auto& y : pts) {
            if (x != y) ASSERT_EQ(affine_line_through(f, x, y), line);
          }
        }
        const auto [base, dir] = space.canonical_line(a, b);
        ASSERT_EQ(space.unpack(base), line.base);
        ASSERT_EQ(space.unpack(dir), line.direction);
      }
    }
  }
}

TEST(Vectors, CoordinatesInPair) {
  auto f = Field::make(5, 1);
  const Vector v0 = vec({1, 2, 0}), v1 = vec({0, 1, 3});
  for (std::uint32_t a = 0; a < 5; ++a) {
    for (std::uint32_t b = 0; b < 5; ++b) {
      const Vector u = add(f, scale(f, Scalar{a}, v0), scale(f, Scalar{b}, v1));
      const auto c = coordinates_in_pair(f, v0, v1, u);
      ASSERT_TRUE(c);
      EXPECT_EQ(c->first, Scalar{a});
      EXPECT_EQ(c->second, Scalar{b});
    }
  }
  EXPECT_FALSE(coordinates_in_pair(f, v0, v1, vec({0, 0, 1})));
}
