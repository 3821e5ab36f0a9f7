#include <gtest/gtest.h>

#include <set>

#include "boxlb/construct.hpp"
#include "boxlb/trials.hpp"
#include "oracles.hpp"

using namespace boxlb;

namespace {

// Arguments in (q, s, d, r) order with q = p^k.
Params params(std::uint32_t p, std::uint32_t k, int s, int d, int r) {
  return Params::make(d, r, s, Field::make(p, k));
}

std::vector<MultilinearForm> single(const Params& pr, std::vector<std::uint32_t> coeffs) {
  std::vector<Scalar> c;
  for (auto x : coeffs) c.push_back(Scalar{x});
  return {MultilinearForm(pr.field(), std::vector<std::size_t>(pr.d(), pr.s()), c)};
}

}  // namespace

TEST(Params, Derived) {
  const auto pr = params(2, 1, 3, 3, 1);
  EXPECT_EQ(pr.n(), 24u);
  EXPECT_EQ(pr.target_exponent(), Rational(8, 3));
  EXPECT_TRUE(pr.theorem_regime());
  EXPECT_FALSE(params(2, 1, 4, 3, 1).theorem_regime());
  EXPECT_DOUBLE_EQ(params(3, 1, 2, 2, 1).leading_constant(), std::pow(2.0, 0.5 - 2));
  EXPECT_EQ(params(5, 1, 2, 2, 1).expected_edges(), Rational(576, 5));
  EXPECT_EQ(params(2, 1, 2, 2, 1).expected_boxes(), Rational(9, 4));
  EXPECT_EQ(params(3, 1, 2, 2, 1).line_product_size(), 36u);
  EXPECT_THROW(Params::make(1, 1, 1, Field::make(2, 1)), std::invalid_argument);
  EXPECT_THROW(Params::make(2, 0, 1, Field::make(2, 1)), std::invalid_argument);
}

TEST(EdgeSet, Examples) {
  const auto pr = params(2, 1, 1, 2, 1);
  const auto one = build_edge_set(pr, single(pr, {1}));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.tuple(0), (std::vector<Point>{1, 1}));
  EXPECT_TRUE(build_edge_set(pr, single(pr, {0})).empty());
  EXPECT_EQ(find_boxes(pr, single(pr, {1})).size(), 0u);
}

TEST(EdgeSet, MatchesNaiveEvaluation) {
  for (auto [p, k, s, d, r] : std::vector<std::tuple<std::uint32_t, std::uint32_t, int, int, int>>{
           {2, 1, 2, 2, 1}, {3, 1, 2, 2, 1}, {3, 1, 2, 2, 2}, {2, 1, 2, 3, 1}, {2, 2, 2, 2, 1}, {5, 1, 1, 3, 2}}) {
    const auto pr = params(p, k, s, d, r);
    Rng rng(17);
    for (int t = 0; t < 10; ++t) {
      const auto forms = sample_forms(pr, rng);
      const auto edges = build_edge_set(pr, forms);
      ASSERT_EQ(oracle::as_set(edges), oracle::edges_naive(pr, forms));
      for (std::size_t i = 0; i < edges.size(); ++i) {
        for (auto x : edges.tuple(i)) ASSERT_NE(x, 0u);
      }
    }
  }
}

TEST(Boxes, MatchNaiveAndLineProducts) {
  // F from the corner definition (no independence filter) equals find_boxes,
  // equals the union of P(l) over the line tuples, and the identity
  // |L| q^d (q-1)^d = |F| holds.
  for (auto [p, k, s, d, r] : std::vector<std::tuple<std::uint32_t, std::uint32_t, int, int, int>>{
           {2, 1, 2, 2, 1}, {3, 1, 2, 2, 1}, {2, 1, 2, 3, 1}, {2, 2, 2, 2, 1}, {2, 1, 3, 2, 1}, {3, 1, 1, 2, 1}}) {
    const auto pr = params(p, k, s, d, r);
    Rng rng(23);
    for (int t = 0; t < 8; ++t) {
      const auto forms = sample_forms(pr, rng);
      const auto naive_e = oracle::edges_naive(pr, forms);
      const auto naive_f = oracle::boxes_naive(pr, naive_e);
      const auto boxes = find_boxes(pr, forms);
      ASSERT_EQ(oracle::as_set(boxes.tuples()), naive_f);
      std::size_t line_count = 0;
      ASSERT_EQ(oracle::products_of_lines(pr, naive_f, &line_count), naive_f);
      const auto lines = lines_of_boxes(pr, boxes);
      EXPECT_EQ(lines.size(), line_count);
      EXPECT_EQ(lines.size() * pr.line_product_size(), boxes.size());
      EXPECT_EQ(line_product_coverage(pr, lines, boxes), boxes.size());
    }
  }
}

TEST(Boxes, CountMatchesFamily) {
  for (auto [p, k, s, d, r] : std::vector<std::tuple<std::uint32_t, std::uint32_t, int, int, int>>{
           {2, 1, 2, 2, 1}, {5, 1, 2, 2, 1}, {2, 2, 2, 3, 1}, {3, 1, 2, 3, 2}, {2, 1, 3, 2, 2}, {17, 1, 2, 2, 1}}) {
    const auto pr = params(p, k, s, d, r);
    Rng rng(41);
    for (int t = 0; t < 3; ++t) {
      const auto forms = sample_forms(pr, rng);
      EXPECT_EQ(count_boxes(pr, forms), find_boxes(pr, forms).size());
    }
  }
}

TEST(Boxes, LargeSpaceAgainstTabulatedForm) {
  // 289 points: past the level-set table, so the last slot goes through the
  // linear solver.
  const auto pr = params(17, 1, 2, 2, 1);
  const auto& space = pr.space();
  const std::uint32_t v = space.size();
  // F is empty unless the form is singular, so keep sampling until a nonempty
  // family has been compared.
  Rng rng(5);
  std::size_t nonempty = 0;
  std::vector<char> one(static_cast<std::size_t>(v) * v);
  std::vector<std::uint64_t> expected;
  std::vector<Point> sols;
  for (int t = 0; t < 200 && nonempty == 0; ++t) {
    const auto forms = sample_forms(pr, rng);
    for (Point a = 0; a < v; ++a) {
      for (Point x = 0; x < v; ++x) {
        const std::vector<Vector> args{space.unpack(a), space.unpack(x)};
        one[a * v + x] = evaluate(forms[0], args) == pr.field().one();
      }
    }
    expected.clear();
    for (Point a0 = 1; a0 < v; ++a0) {
      for (Point a1 = 1; a1 < v; ++a1) {
        if (a0 == a1) continue;
        sols.clear();
        for (Point x = 0; x < v; ++x) {
          if (one[a0 * v + x] && one[a1 * v + x]) sols.push_back(x);
        }
        for (Point x0 : sols) {
          for (Point x1 : sols) {
            if (x0 != x1) expected.push_back(((std::uint64_t{a0} * v + a1) * v + x0) * v + x1);
          }
        }
      }
    }
    ASSERT_EQ(find_boxes(pr, forms).tuples().codes(), expected);
    if (!expected.empty()) ++nonempty;
  }
  EXPECT_EQ(nonempty, 1u);
}

TEST(Boxes, WitnessCorners) {
  const BoxWitness w{{{1, 2}, {3, 4}}};
  EXPECT_EQ(w.corners(), (std::vector<std::vector<Point>>{{1, 3}, {1, 4}, {2, 3}, {2, 4}}));
  EXPECT_EQ(w.flatten(), (std::vector<Point>{1, 2, 3, 4}));
  const std::vector<Point> flat{1, 2, 3, 4};
  EXPECT_EQ(BoxWitness::from_flat(flat).pairs, w.pairs);
}

TEST(Lines, CanonicalAcrossWitnesses) {
  const auto pr = params(3, 1, 2, 2, 1);
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto forms = sample_forms(pr, rng);
    const auto boxes = find_boxes(pr, forms);
    const auto lines = lines_of_boxes(pr, boxes);
    // Every point of every product is a member of F and maps back to its tuple.
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto lt = lines.line_tuple(i);
      const auto axes = line_product_points(pr, lt);
      ASSERT_EQ(axes.size(), 2u);
      oracle::for_each_tuple(pr.q(), 2 * pr.d(), [&](const std::vector<Point>& idx) {
        std::vector<Point> flat(idx.size());
        for (int j = 0; j < pr.d(); ++j) {
          if (idx[2 * j] == idx[2 * j + 1]) return;
          flat[2 * j] = axes[j][idx[2 * j]];
          flat[2 * j + 1] = axes[j][idx[2 * j + 1]];
        }
        ASSERT_TRUE(boxes.tuples().contains(flat));
        for (int j = 0; j < pr.d(); ++j) {
          const auto [base, dir] = pr.space().canonical_line(flat[2 * j], flat[2 * j + 1]);
          ASSERT_EQ(lt.lines[j], (LineKey{base, dir}));
        }
      });
    }
  }
  EXPECT_EQ(lines_of_boxes(pr, BoxFamily(pr.points(), pr.d(), {})).size(), 0u);
}

TEST(BadEdges, TwoOraclesAgree) {
  for (auto [p, k, s, d, r] : std::vector<std::tuple<std::uint32_t, std::uint32_t, int, int, int>>{
           {3, 1, 2, 2, 1}, {2, 1, 2, 3, 1}, {5, 1, 2, 2, 1}, {2, 2, 2, 2, 1}}) {
    const auto pr = params(p, k, s, d, r);
    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
      const auto forms = sample_forms(pr, rng);
      const auto edges = build_edge_set(pr, forms);
      const auto boxes = find_boxes(pr, forms);
      const auto lines = lines_of_boxes(pr, boxes);
      const auto bad = bad_edges(pr, edges, lines);
      ASSERT_EQ(bad, bad_edges_direct(pr, edges));
      // Edges appearing as a corner of some member of F.
      std::set<std::vector<Point>> corners;
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        for (auto& c : boxes.witness(i).corners()) corners.insert(c);
      }
      ASSERT_EQ(oracle::as_set(bad), corners);
      std::uint64_t qd = 1, q1d = 1;
      for (int j = 0; j < pr.d(); ++j) {
        qd *= pr.q();
        q1d *= pr.q() - 1;
      }
      EXPECT_LE(bad.size() * q1d, boxes.size());
      EXPECT_LE(bad.size(), qd * lines.size());
    }
  }
  const auto pr = params(3, 1, 2, 2, 1);
  const EdgeSet none(pr.points(), 2, {});
  EXPECT_TRUE(bad_edges(pr, none, LineFamily(pr.points(), 2, {})).empty());
}

TEST(Detector, PlantedCompletePartite) {
  for (int d = 2; d <= 4; ++d) {
    const std::uint32_t points = 5;
    std::vector<std::uint64_t> codes;
    oracle::for_each_tuple(3, d, [&](const std::vector<Point>& t) {
      std::uint64_t c = 0;
      for (auto x : t) c = c * points + (x + 1);
      codes.push_back(c);
    });
    const EdgeSet complete(points, d, codes);
    const auto w = find_box_witness(complete);
    ASSERT_TRUE(w);
    for (const auto& c : w->corners()) EXPECT_TRUE(complete.contains(c));
    for (const auto& [a, b] : w->pairs) EXPECT_NE(a, b);
    // One edge short of a box on two vertices per side.
    std::vector<std::uint64_t> almost;
    oracle::for_each_tuple(2, d, [&](const std::vector<Point>& t) {
      std::uint64_t c = 0;
      for (auto x : t) c = c * points + x + 1;
      almost.push_back(c);
    });
    almost.pop_back();
    EXPECT_FALSE(find_box_witness(EdgeSet(points, d, almost)));
  }
}

TEST(Detector, FindsMemberOfFBeforeDeletion) {
  const auto pr = params(3, 1, 2, 2, 1);
  Rng rng(8);
  int seen = 0;
  for (int t = 0; t < 50; ++t) {
    const auto forms = sample_forms(pr, rng);
    const auto edges = build_edge_set(pr, forms);
    const auto boxes = find_boxes(pr, forms);
    const auto w = find_box_witness(edges);
    ASSERT_EQ(w.has_value(), boxes.size() > 0);
    if (w) {
      ++seen;
      EXPECT_TRUE(boxes.contains(*w));
    }
  }
  EXPECT_GT(seen, 0);
}

TEST(Deletion, BoxFreeOnSeededInstances) {
  for (auto [p, k, s, d, r] : std::vector<std::tuple<std::uint32_t, std::uint32_t, int, int, int>>{
           {3, 1, 2, 2, 1}, {2, 1, 2, 3, 1}, {3, 1, 3, 3, 1}, {2, 2, 2, 2, 1}, {2, 1, 3, 3, 2}}) {
    const auto pr = params(p, k, s, d, r);
    for (std::uint64_t t = 0; t < 5; ++t) {
      Rng rng = Rng::stream(99, t);
      const auto inst = run_instance(pr, sample_forms(pr, rng));
      EXPECT_EQ(inst.kept.size(), inst.edges.size() - inst.bad.size());
      EXPECT_FALSE(find_box_witness(inst.kept));
    }
  }
}

TEST(Deletion, RejectsNonSubset) {
  const EdgeSet e(4, 2, {5, 6});
  const EdgeSet b(4, 2, {7});
  EXPECT_THROW(delete_and_verify(e, b), VerificationError);
}

TEST(Budget, Refuses) {
  const auto pr = params(3, 1, 4, 4, 1);
  Rng rng(1);
  const auto forms = sample_forms(pr, rng);
  Budget small;
  small.tuples = 1000;
  EXPECT_THROW(build_edge_set(pr, forms, small), BudgetExceeded);
  EXPECT_THROW(find_boxes(pr, forms, small), BudgetExceeded);
  TrialOptions opt;
  opt.mode = Mode::exact;
  EXPECT_THROW(run_trials(pr, opt), BudgetExceeded);
}

TEST(Trials, ExactSmallConfigurations) {
  struct Case {
    std::uint32_t p;
    int s, d, r;
    Rational edges, boxes;
  };
  for (const auto& c : {Case{2, 1, 2, 1, Rational(1, 2), 0}, Case{2, 2, 2, 1, Rational(9, 2), Rational(9, 4)},
                        Case{3, 1, 2, 1, Rational(4, 3), 0}}) {
    const auto pr = params(c.p, 1, c.s, c.d, c.r);
    TrialOptions opt;
    opt.mode = Mode::exact;
    const auto st = run_trials(pr, opt);
    EXPECT_EQ(st.records.size(), tensor_space_size(pr));
    EXPECT_EQ(st.edges.mean(), c.edges);
    EXPECT_EQ(st.boxes.mean(), c.boxes);
    EXPECT_EQ(st.edges.mean(), pr.expected_edges());
    EXPECT_EQ(st.boxes.mean(), pr.expected_boxes());
  }
}

TEST(Trials, DeterministicAndWorkerIndependent) {
  const auto pr = params(3, 1, 2, 2, 1);
  TrialOptions opt;
  opt.trials = 40;
  opt.seed = 12;
  opt.workers = 1;
  const auto a = run_trials(pr, opt);
  opt.workers = 3;
  const auto b = run_trials(pr, opt);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].index, i);
    EXPECT_EQ(a.records[i].edges, b.records[i].edges);
    EXPECT_EQ(a.records[i].boxes, b.records[i].boxes);
    EXPECT_EQ(a.records[i].bad, b.records[i].bad);
    EXPECT_EQ(a.records[i].kept, b.records[i].edges - b.records[i].bad);
  }
  EXPECT_EQ(a.edges.mean(), b.edges.mean());
  opt.trials = 0;
  EXPECT_THROW(run_trials(pr, opt), std::invalid_argument);
}

TEST(Moments, Basics) {
  Moments m;
  for (std::uint64_t x : {2, 4, 4, 4, 5, 5, 7, 9}) m.add(x);
  EXPECT_EQ(m.mean(), Rational(5));
  EXPECT_DOUBLE_EQ(m.variance(), 32.0 / 7);
  EXPECT_DOUBLE_EQ(m.z_score(Rational(5)), 0.0);
  Moments c;
  c.add(3);
  c.add(3);
  EXPECT_EQ(c.z_score(Rational(3)), 0.0);
  EXPECT_TRUE(std::isinf(c.z_score(Rational(2))));
}
