#include "boxlb/construct.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "boxlb/bounds.hpp"

namespace boxlb {
namespace {

// Base^exp, or limit + 1 when it would exceed limit.
std::uint64_t capped_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t limit) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > limit / base) return limit + 1;
    r *= base;
  }
  return r;
}

BigInt big_pow(std::uint64_t base, std::uint64_t exp) {
  BigInt r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r *= base;
  return r;
}

void check_forms(const Params& params, std::span<const MultilinearForm> forms) {
  if (forms.size() != static_cast<std::size_t>(params.r())) {
    throw std::invalid_argument("expected " + std::to_string(params.r()) + " forms");
  }
  for (const auto& f : forms) {
    if (!(f.field() == params.field())) throw FieldError("form is over a different field");
    if (f.arity() != static_cast<std::size_t>(params.d())) {
      throw FieldError("form arity does not match d");
    }
    for (auto m : f.dims()) {
      if (m != static_cast<std::size_t>(params.s())) throw FieldError("form slot is not F_q^s");
    }
  }
}

void check_tuple_budget(const Params& params, const Budget& budget) {
  const std::uint64_t total = capped_pow(params.points(), params.d(), budget.tuples);
  if (total > budget.tuples) {
    throw BudgetExceeded("(q^s)^d = " + big_pow(params.points(), params.d()).str() +
                         " tuples exceeds the budget of " + std::to_string(budget.tuples));
  }
}

// out[t] = sum_i x[i] * a[i * stride + t], where a has x.size() * stride entries.
void contract(const Field& f, const Scalar* a, std::span<const Scalar> x, std::size_t stride,
              Scalar* out) {
  std::fill(out, out + stride, Scalar{0});
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Scalar xi = x[i];
    if (xi.value == 0) continue;
    const Scalar* row = a + i * stride;
    for (std::size_t t = 0; t < stride; ++t) out[t] = f.add(out[t], f.mul(xi, row[t]));
  }
}

bool all_zero(const Scalar* a, std::size_t n) {
  return std::all_of(a, a + n, [](Scalar s) { return s.value == 0; });
}

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

class EdgeBuilder {
 public:
  EdgeBuilder(const Params& params, std::span<const MultilinearForm> forms)
      : params_(params), f_(params.field()), s_(params.s()), d_(params.d()), r_(params.r()) {
    levels_.resize(d_);
    for (int j = 0; j < d_; ++j) levels_[j].resize(r_ * ipow(s_, d_ - j));
    for (int i = 0; i < r_; ++i) {
      std::copy(forms[i].coeffs().begin(), forms[i].coeffs().end(),
                levels_[0].begin() + i * ipow(s_, d_));
    }
  }

  std::vector<std::uint64_t> run() {
    descend(0, 0);
    return std::move(codes_);
  }

 private:
  void descend(int j, std::uint64_t prefix) {
    const VectorSpace& space = params_.space();
    const std::size_t width = ipow(s_, d_ - j);
    const auto& cur = levels_[j];
    if (j == d_ - 1 && space.level_set_words() > 0) {
      // Read each functional as a point and intersect its level sets.
      const std::size_t words = space.level_set_words();
      const std::uint32_t q = f_.order();
      acc_.assign(words, ~std::uint64_t{0});
      for (int i = 0; i < r_; ++i) {
        Point u = 0;
        for (std::size_t c = 0; c < s_; ++c) u = u * q + cur[i * width + c].value;
        const std::uint64_t* row = space.ones(u);
        for (std::size_t w = 0; w < words; ++w) acc_[w] &= row[w];
      }
      for (std::size_t w = 0; w < words; ++w) {
        for (std::uint64_t bits = acc_[w]; bits; bits &= bits - 1) {
          codes_.push_back(prefix * space.size() + w * 64 + std::countr_zero(bits));
        }
      }
      return;
    }
    if (j == d_ - 1) {
      for (Point p = 1; p < space.size(); ++p) {
        auto x = space.coords(p);
        bool ok = true;
        for (int i = 0; i < r_ && ok; ++i) {
          Scalar v;
          contract(f_, cur.data() + i * width, x, 1, &v);
          ok = v.value == 1;
        }
        if (ok) codes_.push_back(prefix * space.size() + p);
      }
      return;
    }
    const std::size_t stride = width / s_;
    auto& next = levels_[j + 1];
    for (Point p = 1; p < space.size(); ++p) {
      auto x = space.coords(p);
      bool live = true;
      for (int i = 0; i < r_ && live; ++i) {
        contract(f_, cur.data() + i * width, x, stride, next.data() + i * stride);
        live = !all_zero(next.data() + i * stride, stride);
      }
      if (live) descend(j + 1, prefix * space.size() + p);
    }
  }

  const Params& params_;
  const Field& f_;
  std::size_t s_;
  int d_;
  int r_;
  std::vector<std::vector<Scalar>> levels_;
  std::vector<std::uint64_t> codes_;
  std::vector<std::uint64_t> acc_;
};

// Solves A x = (1, ..., 1) for x in F_q^s, with the rows of A given as
// consecutive length-s functionals. Scratch space is reused across calls.
class AffineSolver {
 public:
  explicit AffineSolver(const VectorSpace& space) : space_(space), s_(space.dim()) {}

  void solve(const Scalar* functionals, std::size_t count, std::vector<Point>& out) {
    const Field& f = space_.field();
    const std::size_t w = s_ + 1;
    out.clear();
    m_.resize(count * w);
    for (std::size_t r = 0; r < count; ++r) {
      std::copy(functionals + r * s_, functionals + (r + 1) * s_, m_.begin() + r * w);
      m_[r * w + s_] = f.one();
    }
    auto at = [&](std::size_t r, std::size_t c) -> Scalar& { return m_[r * w + c]; };
    pivots_.clear();
    std::size_t rk = 0;
    for (std::size_t c = 0; c < s_ && rk < count; ++c) {
      std::size_t piv = rk;
      while (piv < count && at(piv, c).value == 0) ++piv;
      if (piv == count) continue;
      if (piv != rk) std::swap_ranges(m_.begin() + piv * w, m_.begin() + (piv + 1) * w, m_.begin() + rk * w);
      const Scalar inv = f.inv(at(rk, c));
      for (std::size_t t = c; t < w; ++t) at(rk, t) = f.mul(inv, at(rk, t));
      for (std::size_t r = 0; r < count; ++r) {
        if (r == rk || at(r, c).value == 0) continue;
        const Scalar factor = at(r, c);
        for (std::size_t t = c; t < w; ++t) at(r, t) = f.sub(at(r, t), f.mul(factor, at(rk, t)));
      }
      pivots_.push_back(c);
      ++rk;
    }
    for (std::size_t r = rk; r < count; ++r) {
      if (at(r, s_).value != 0) return;
    }
    free_.clear();
    for (std::size_t c = 0, pi = 0; c < s_; ++c) {
      if (pi < pivots_.size() && pivots_[pi] == c) {
        ++pi;
      } else {
        free_.push_back(c);
      }
    }
    const std::uint32_t q = f.order();
    const std::size_t solutions = ipow(q, static_cast<int>(free_.size()));
    x_.assign(s_, Scalar{0});
    for (std::size_t assign = 0; assign < solutions; ++assign) {
      std::size_t rest = assign;
      for (auto c : free_) {
        x_[c] = Scalar{static_cast<std::uint32_t>(rest % q)};
        rest /= q;
      }
      Point packed = 0;
      for (std::size_t i = 0; i < pivots_.size(); ++i) {
        Scalar v = at(i, s_);
        for (auto c : free_) v = f.sub(v, f.mul(at(i, c), x_[c]));
        x_[pivots_[i]] = v;
      }
      for (std::size_t c = 0; c < s_; ++c) packed = packed * q + x_[c].value;
      out.push_back(packed);
    }
  }

 private:
  const VectorSpace& space_;
  std::size_t s_;
  std::vector<Scalar> m_;
  std::vector<std::size_t> pivots_, free_;
  Vector x_;
};

class BoxFinder {
 public:
  BoxFinder(const Params& params, std::span<const MultilinearForm> forms, bool count_only = false)
      : params_(params),
        f_(params.field()),
        s_(params.s()),
        d_(params.d()),
        r_(params.r()),
        table_(params.space().level_set_words() > 0),
        count_only_(count_only),
        solver_(params.space()) {
    const VectorSpace& space = params.space();
    if (!table_ || d_ > 2) {
      for (Point a = 1; a < space.size(); ++a) {
        for (Point b = 1; b < space.size(); ++b) {
          if (space.independent(a, b)) pairs_.emplace_back(a, b);
        }
      }
    }
    std::vector<Scalar> top(r_ * ipow(s_, d_));
    for (int i = 0; i < r_; ++i) {
      std::copy(forms[i].coeffs().begin(), forms[i].coeffs().end(),
                top.begin() + i * ipow(s_, d_));
    }
    levels_.resize(d_);
    levels_[0] = std::move(top);
  }

  std::vector<std::uint64_t> run() {
    descend(0, 0);
    if (!std::is_sorted(codes_.begin(), codes_.end())) std::sort(codes_.begin(), codes_.end());
    return std::move(codes_);
  }

  std::uint64_t count() {
    descend(0, 0);
    return count_;
  }

 private:
  // At level j the state holds 2^j corner prefixes times r arrays, each of
  // s^(d-j) entries.
  void descend(int j, std::uint64_t prefix) {
    const VectorSpace& space = params_.space();
    const std::uint64_t v = space.size();
    const std::size_t width = ipow(s_, d_ - j);
    const std::size_t arrays = (std::size_t{1} << j) * r_;
    const auto& cur = levels_[j];

    if (table_ && j == d_ - 2) {
      last_two(cur.data(), arrays, prefix);
      return;
    }
    if (j == d_ - 1) {
      solver_.solve(cur.data(), arrays, sols_);
      if (count_only_) {
        count_ += sols_.size() * (sols_.size() - (sols_.empty() ? 0 : 1));
        return;
      }
      for (Point x0 : sols_) {
        for (Point x1 : sols_) {
          if (x0 != x1) codes_.push_back((prefix * v + x0) * v + x1);
        }
      }
      return;
    }

    // Contract every array with every nonzero point once.
    const std::size_t stride = width / s_;
    std::vector<Scalar> table(static_cast<std::size_t>(v) * arrays * stride);
    std::vector<char> live(v, 0);
    for (Point p = 1; p < v; ++p) {
      auto x = space.coords(p);
      Scalar* dst = table.data() + static_cast<std::size_t>(p) * arrays * stride;
      bool ok = true;
      for (std::size_t a = 0; a < arrays && ok; ++a) {
        contract(f_, cur.data() + a * width, x, stride, dst + a * stride);
        ok = !all_zero(dst + a * stride, stride);
      }
      live[p] = ok;
    }
    auto& next = levels_[j + 1];
    next.resize(2 * arrays * stride);
    for (const auto& [a0, a1] : pairs_) {
      if (!live[a0] || !live[a1]) continue;
      const Scalar* t0 = table.data() + static_cast<std::size_t>(a0) * arrays * stride;
      const Scalar* t1 = table.data() + static_cast<std::size_t>(a1) * arrays * stride;
      // New prefix (c << 1 | e) holds the r arrays of prefix c contracted with a_e.
      for (std::size_t c = 0; c < (std::size_t{1} << j); ++c) {
        const std::size_t block = r_ * stride;
        std::copy(t0 + c * block, t0 + (c + 1) * block, next.begin() + (2 * c) * block);
        std::copy(t1 + c * block, t1 + (c + 1) * block, next.begin() + (2 * c + 1) * block);
      }
      descend(j + 1, (prefix * v + a0) * v + a1);
    }
  }

  // Last two slots at once. For each point a, level(a) is the set of x with
  // every bilinear array giving (a, x) -> 1; a pair (a0, a1) then extends by
  // any two distinct points of level(a0) & level(a1). Points whose level set
  // has fewer than two elements never take part.
  void last_two(const Scalar* arrays_data, std::size_t arrays, std::uint64_t prefix) {
    const VectorSpace& space = params_.space();
    const std::uint32_t v = space.size();
    const std::uint32_t q = f_.order();
    const std::size_t words = space.level_set_words();
    const std::size_t width = s_ * s_;
    good_.clear();
    sets_.clear();
    buf_.resize(s_);
    acc_.resize(words);
    for (Point p = 1; p < v; ++p) {
      const auto x = space.coords(p);
      std::fill(acc_.begin(), acc_.end(), ~std::uint64_t{0});
      for (std::size_t a = 0; a < arrays; ++a) {
        contract(f_, arrays_data + a * width, x, s_, buf_.data());
        Point u = 0;
        for (std::size_t i = 0; i < s_; ++i) u = u * q + buf_[i].value;
        const std::uint64_t* row = space.ones(u);
        for (std::size_t w = 0; w < words; ++w) acc_[w] &= row[w];
      }
      int count = 0;
      for (std::size_t w = 0; w < words; ++w) count += std::popcount(acc_[w]);
      if (count < 2) continue;
      good_.push_back(p);
      sets_.insert(sets_.end(), acc_.begin(), acc_.end());
    }
    for (std::size_t i = 0; i < good_.size(); ++i) {
      for (std::size_t k = 0; k < good_.size(); ++k) {
        if (i == k) continue;
        const std::uint64_t* si = sets_.data() + i * words;
        const std::uint64_t* sk = sets_.data() + k * words;
        if (!two_or_more(si, sk, words)) continue;
        if (count_only_) {
          int count = 0;
          for (std::size_t w = 0; w < words; ++w) count += std::popcount(si[w] & sk[w]);
          count_ += static_cast<std::uint64_t>(count) * (count - 1);
          continue;
        }
        sols_.clear();
        for (std::size_t w = 0; w < words; ++w) {
          for (std::uint64_t bits = si[w] & sk[w]; bits; bits &= bits - 1) {
            sols_.push_back(static_cast<Point>(w * 64 + std::countr_zero(bits)));
          }
        }
        const std::uint64_t head = (prefix * v + good_[i]) * v + good_[k];
        for (Point x0 : sols_) {
          for (Point x1 : sols_) {
            if (x0 != x1) codes_.push_back((head * v + x0) * v + x1);
          }
        }
      }
    }
  }

  static bool two_or_more(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
    bool seen = false;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t m = a[w] & b[w];
      if (m == 0) continue;
      if (seen || (m & (m - 1)) != 0) return true;
      seen = true;
    }
    return false;
  }

  const Params& params_;
  const Field& f_;
  std::size_t s_;
  int d_;
  int r_;
  bool table_;
  bool count_only_;
  std::uint64_t count_ = 0;
  std::vector<std::pair<Point, Point>> pairs_;
  std::vector<std::vector<Scalar>> levels_;
  std::vector<std::uint64_t> codes_;
  AffineSolver solver_;
  std::vector<Point> sols_;
  std::vector<Point> good_;
  std::vector<std::uint64_t> sets_;
  std::vector<std::uint64_t> acc_;
  std::vector<Scalar> buf_;
};

// Box search on a sorted list of m-digit codes (base `points`).
std::optional<std::vector<std::pair<Point, Point>>> find_box_in(
    const std::vector<std::uint64_t>& codes, int m, std::uint64_t points) {
  if (m == 1) {
    if (codes.size() < 2) return std::nullopt;
    return std::vector<std::pair<Point, Point>>{
        {static_cast<Point>(codes[0]), static_cast<Point>(codes[1])}};
  }
  const std::uint64_t tail_base = capped_pow(points, m - 1, UINT64_MAX);
  const std::size_t need = std::size_t{1} << (m - 1);
  struct Group {
    Point head;
    std::vector<std::uint64_t> tails;
  };
  std::vector<Group> groups;
  for (std::size_t i = 0; i < codes.size();) {
    const auto head = static_cast<Point>(codes[i] / tail_base);
    Group g{head, {}};
    for (; i < codes.size() && codes[i] / tail_base == head; ++i) g.tails.push_back(codes[i] % tail_base);
    if (g.tails.size() >= need) groups.push_back(std::move(g));
  }
  std::vector<std::uint64_t> common;
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      common.clear();
      std::set_intersection(groups[a].tails.begin(), groups[a].tails.end(),
                            groups[b].tails.begin(), groups[b].tails.end(),
                            std::back_inserter(common));
      if (common.size() < need) continue;
      if (auto rest = find_box_in(common, m - 1, points)) {
        rest->insert(rest->begin(), {groups[a].head, groups[b].head});
        return rest;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

Params Params::make(int d, int r, int s, Field field) {
  if (d < 2) throw std::invalid_argument("uniformity d must be at least 2");
  if (r < 1) throw std::invalid_argument("number of forms r must be at least 1");
  if (s < 1) throw std::invalid_argument("dimension s must be at least 1");
  if (d > 16 || s > 16) throw BudgetExceeded("d and s are limited to 16");
  std::shared_ptr<const VectorSpace> space;
  try {
    space = std::make_shared<const VectorSpace>(std::move(field), s);
  } catch (const FieldError& e) {
    throw BudgetExceeded(e.what());
  }
  return Params(d, r, s, std::move(space));
}

bool Params::theorem_regime() const { return check_params(d_, r_, s_); }

double Params::leading_constant() const {
  return std::pow(static_cast<double>(d_), static_cast<double>(r_) / s_ - d_);
}

Rational Params::expected_edges() const {
  const std::uint64_t v = points();
  return Rational(big_pow(v - 1, d_), big_pow(q(), r_));
}

Rational Params::expected_boxes() const {
  const std::uint64_t v = points();
  return Rational(big_pow(v - 1, d_) * big_pow(v - q(), d_),
                  big_pow(q(), (std::uint64_t{1} << d_) * r_));
}

Rational Params::target_edges() const {
  const long long e = static_cast<long long>(d_) * s_ - r_;
  if (e >= 0) return Rational(big_pow(q(), e));
  return Rational(BigInt(1), big_pow(q(), -e));
}

std::uint64_t Params::line_product_size() const {
  return capped_pow(q(), d_, UINT64_MAX) * capped_pow(q() - 1, d_, UINT64_MAX);
}

TupleSet::TupleSet(std::uint32_t points, int arity, std::vector<std::uint64_t> codes)
    : points_(points), arity_(arity), codes_(std::move(codes)) {
  if (capped_pow(points, arity, UINT64_MAX / 2) > UINT64_MAX / 2) {
    throw BudgetExceeded("tuple codes do not fit in 64 bits");
  }
  if (!std::is_sorted(codes_.begin(), codes_.end())) std::sort(codes_.begin(), codes_.end());
  codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
}

bool TupleSet::contains_code(std::uint64_t code) const {
  return std::binary_search(codes_.begin(), codes_.end(), code);
}

std::uint64_t TupleSet::encode(std::span<const Point> tuple) const {
  if (tuple.size() != static_cast<std::size_t>(arity_)) throw std::invalid_argument("tuple arity");
  std::uint64_t code = 0;
  for (Point p : tuple) {
    if (p >= points_) throw std::invalid_argument("point out of range");
    code = code * points_ + p;
  }
  return code;
}

std::vector<Point> TupleSet::decode(std::uint64_t code) const {
  std::vector<Point> out(arity_);
  for (int j = arity_; j-- > 0;) {
    out[j] = static_cast<Point>(code % points_);
    code /= points_;
  }
  return out;
}

std::vector<std::vector<Point>> BoxWitness::corners() const {
  const std::size_t d = pairs.size();
  std::vector<std::vector<Point>> out;
  for (std::size_t c = 0; c < (std::size_t{1} << d); ++c) {
    std::vector<Point> corner(d);
    for (std::size_t j = 0; j < d; ++j) {
      corner[j] = ((c >> (d - 1 - j)) & 1) ? pairs[j].second : pairs[j].first;
    }
    out.push_back(std::move(corner));
  }
  return out;
}

std::vector<Point> BoxWitness::flatten() const {
  std::vector<Point> out;
  for (const auto& [a, b] : pairs) {
    out.push_back(a);
    out.push_back(b);
  }
  return out;
}

BoxWitness BoxWitness::from_flat(std::span<const Point> flat) {
  BoxWitness w;
  for (std::size_t i = 0; i + 1 < flat.size(); i += 2) w.pairs.emplace_back(flat[i], flat[i + 1]);
  return w;
}

LineTuple LineFamily::line_tuple(std::size_t i) const {
  const auto flat = set_.tuple(i);
  LineTuple lt;
  for (std::size_t j = 0; j + 1 < flat.size(); j += 2) lt.lines.push_back({flat[j], flat[j + 1]});
  return lt;
}

std::vector<MultilinearForm> sample_forms(const Params& params, Rng& rng) {
  std::vector<MultilinearForm> forms;
  for (int i = 0; i < params.r(); ++i) {
    forms.push_back(sample_uniform(params.field(), std::vector<std::size_t>(params.d(), params.s()), rng));
  }
  return forms;
}

std::vector<MultilinearForm> forms_from_index(const Params& params, std::uint64_t index) {
  const std::size_t coeffs = ipow(params.s(), params.d());
  const std::uint64_t per_form = capped_pow(params.q(), coeffs, UINT64_MAX / 2);
  const std::uint64_t total = capped_pow(per_form, params.r(), UINT64_MAX / 2);
  if (total > UINT64_MAX / 2 || index >= total) {
    throw std::invalid_argument("form tuple index outside the tensor space");
  }
  std::vector<MultilinearForm> forms;
  for (int i = 0; i < params.r(); ++i) {
    forms.push_back(form_from_index(params.field(),
                                    std::vector<std::size_t>(params.d(), params.s()),
                                    index % per_form));
    index /= per_form;
  }
  std::reverse(forms.begin(), forms.end());
  return forms;
}

EdgeSet build_edge_set(const Params& params, std::span<const MultilinearForm> forms,
                       const Budget& budget) {
  check_forms(params, forms);
  check_tuple_budget(params, budget);
  return EdgeSet(params.points(), params.d(), EdgeBuilder(params, forms).run());
}

namespace {
void check_box_budget(const Params& params, std::span<const MultilinearForm> forms,
                      const Budget& budget) {
  check_forms(params, forms);
  check_tuple_budget(params, budget);
  const std::uint64_t v = params.points();
  const std::uint64_t pairs = (v - 1) * (v - params.q());
  if (capped_pow(pairs, params.d() - 1, budget.tuples) > budget.tuples) {
    throw BudgetExceeded("box search over " + big_pow(pairs, params.d() - 1).str() +
                         " pair prefixes exceeds the budget of " + std::to_string(budget.tuples));
  }
  if (capped_pow(v, 2 * params.d(), UINT64_MAX / 2) > UINT64_MAX / 2) {
    throw BudgetExceeded("box witness codes do not fit in 64 bits");
  }
}
}  // namespace

BoxFamily find_boxes(const Params& params, std::span<const MultilinearForm> forms,
                     const Budget& budget) {
  check_box_budget(params, forms, budget);
  return BoxFamily(params.points(), params.d(), BoxFinder(params, forms).run());
}

std::uint64_t count_boxes(const Params& params, std::span<const MultilinearForm> forms,
                          const Budget& budget) {
  check_box_budget(params, forms, budget);
  return BoxFinder(params, forms, true).count();
}

LineFamily lines_of_boxes(const Params& params, const BoxFamily& boxes) {
  const VectorSpace& space = params.space();
  const auto& set = boxes.tuples();
  std::vector<std::uint64_t> codes;
  codes.reserve(boxes.size() / std::max<std::uint64_t>(1, params.line_product_size()) + 1);
  std::vector<Point> flat(set.arity()), pts(set.arity());
  for (std::uint64_t code : set.codes()) {
    set.decode_into(code, pts);
    for (std::size_t j = 0; j < pts.size(); j += 2) {
      const auto [base, dir] = space.canonical_line(pts[j], pts[j + 1]);
      flat[j] = base;
      flat[j + 1] = dir;
    }
    codes.push_back(set.encode(flat));
  }
  return LineFamily(params.points(), params.d(), std::move(codes));
}

std::vector<std::vector<Point>> line_product_points(const Params& params, const LineTuple& lt) {
  const VectorSpace& space = params.space();
  const Field& f = params.field();
  std::vector<std::vector<Point>> out;
  for (const auto& line : lt.lines) {
    std::vector<Point> pts;
    for (std::uint32_t t = 0; t < f.order(); ++t) {
      pts.push_back(space.add(line.base, space.scale(Scalar{t}, line.direction)));
    }
    out.push_back(std::move(pts));
  }
  return out;
}

namespace {
// Odometer step over sizes; false once every index has wrapped.
bool advance(std::vector<std::size_t>& idx, const std::vector<std::size_t>& sizes) {
  for (std::size_t j = idx.size(); j-- > 0;) {
    if (++idx[j] < sizes[j]) return true;
    idx[j] = 0;
  }
  return false;
}

// Calls fn(tuple) for every element of the cartesian product.
template <typename Fn>
void for_each_product(const std::vector<std::vector<Point>>& axes, Fn&& fn) {
  std::vector<std::size_t> sizes, idx(axes.size(), 0);
  for (const auto& a : axes) {
    if (a.empty()) return;
    sizes.push_back(a.size());
  }
  std::vector<Point> cur(axes.size());
  do {
    for (std::size_t j = 0; j < axes.size(); ++j) cur[j] = axes[j][idx[j]];
    fn(std::span<const Point>(cur));
  } while (advance(idx, sizes));
}
}  // namespace

std::uint64_t line_product_coverage(const Params& params, const LineFamily& lines,
                                    const BoxFamily& boxes) {
  std::uint64_t total = 0;
  std::vector<Point> flat(2 * params.d());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto axes = line_product_points(params, lines.line_tuple(i));
    // Ordered pairs of distinct points on each line.
    std::vector<std::vector<std::pair<Point, Point>>> pairs(axes.size());
    std::vector<std::size_t> sizes;
    for (std::size_t j = 0; j < axes.size(); ++j) {
      for (Point a : axes[j]) {
        for (Point b : axes[j]) {
          if (a != b) pairs[j].emplace_back(a, b);
        }
      }
      sizes.push_back(pairs[j].size());
    }
    std::vector<std::size_t> idx(pairs.size(), 0);
    do {
      for (std::size_t j = 0; j < pairs.size(); ++j) {
        flat[2 * j] = pairs[j][idx[j]].first;
        flat[2 * j + 1] = pairs[j][idx[j]].second;
      }
      if (boxes.tuples().contains(flat)) ++total;
    } while (advance(idx, sizes));
  }
  return total;
}

bool direct_check_applies(const Params& params, const EdgeSet& edges, const Budget& budget) {
  const std::uint64_t per_edge = capped_pow(params.points(), params.d(), budget.direct_check);
  if (per_edge > budget.direct_check) return false;
  return edges.size() == 0 || per_edge <= budget.direct_check / edges.size();
}

namespace {
// Depth-first search for a partner tuple: slot j of the partner is fixed at
// depth j, and every corner whose flipped slots all lie in 0..j is checked as
// soon as it is determined. Candidates for slot j come from the edges that
// agree with the tuple off slot j.
class PartnerSearch {
 public:
  PartnerSearch(const EdgeSet& edges, std::uint32_t points)
      : edges_(edges),
        points_(points),
        d_(edges.arity()),
        edge_(d_),
        partner_(d_),
        corner_(d_),
        by_slot_(d_) {
    std::vector<Point> t(d_);
    for (std::uint64_t code : edges.codes()) {
      edges.decode_into(code, t);
      for (int j = 0; j < d_; ++j) by_slot_[j].push_back({reduced(t, j), t[j]});
    }
    for (auto& idx : by_slot_) std::sort(idx.begin(), idx.end());
  }

  bool extendable(std::uint64_t code) {
    edges_.decode_into(code, edge_);
    return descend(0);
  }

 private:
  std::uint64_t reduced(const std::vector<Point>& t, int skip) const {
    std::uint64_t c = 0;
    for (int i = 0; i < d_; ++i) {
      if (i != skip) c = c * points_ + t[i];
    }
    return c;
  }

  bool descend(int j) {
    if (j == d_) return true;
    const auto& idx = by_slot_[j];
    const std::uint64_t key = reduced(edge_, j);
    auto it = std::lower_bound(idx.begin(), idx.end(), std::pair<std::uint64_t, Point>{key, 0});
    for (; it != idx.end() && it->first == key; ++it) {
      if (it->second == edge_[j]) continue;
      partner_[j] = it->second;
      if (corners_ok(j) && descend(j + 1)) return true;
    }
    return false;
  }

  // Corners flipping slot j and a nonempty subset of slots before it.
  bool corners_ok(int j) {
    for (std::uint32_t mask = 1; mask < (1u << j); ++mask) {
      for (int t = 0; t < d_; ++t) {
        const bool flipped = t == j || (t < j && ((mask >> t) & 1));
        corner_[t] = flipped ? partner_[t] : edge_[t];
      }
      if (!edges_.contains(corner_)) return false;
    }
    return true;
  }

  const EdgeSet& edges_;
  std::uint32_t points_;
  int d_;
  std::vector<Point> edge_, partner_, corner_;
  std::vector<std::vector<std::pair<std::uint64_t, Point>>> by_slot_;
};
}  // namespace

EdgeSet bad_edges_direct(const Params& params, const EdgeSet& edges) {
  PartnerSearch search(edges, params.points());
  std::vector<std::uint64_t> bad;
  for (std::uint64_t code : edges.codes()) {
    if (search.extendable(code)) bad.push_back(code);
  }
  return EdgeSet(edges.points(), params.d(), std::move(bad));
}

EdgeSet bad_edges(const Params& params, const EdgeSet& edges, const LineFamily& lines,
                  const Budget& budget) {
  std::vector<std::uint64_t> codes;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for_each_product(line_product_points(params, lines.line_tuple(i)),
                     [&](std::span<const Point> t) { codes.push_back(edges.encode(t)); });
  }
  EdgeSet bad(edges.points(), params.d(), std::move(codes));
  if (!std::includes(edges.codes().begin(), edges.codes().end(), bad.codes().begin(),
                     bad.codes().end())) {
    throw VerificationError("a line-tuple product contains a non-edge");
  }
  if (direct_check_applies(params, edges, budget) && !(bad_edges_direct(params, edges) == bad)) {
    throw VerificationError("union-of-products bad set differs from the direct definition");
  }
  return bad;
}

std::optional<BoxWitness> find_box_witness(const EdgeSet& edges) {
  auto pairs = find_box_in(edges.codes(), edges.arity(), edges.points());
  if (!pairs) return std::nullopt;
  return BoxWitness{std::move(*pairs)};
}

Deletion delete_and_verify(const EdgeSet& edges, const EdgeSet& bad) {
  if (!std::includes(edges.codes().begin(), edges.codes().end(), bad.codes().begin(),
                     bad.codes().end())) {
    throw VerificationError("bad set is not a subset of the edge set");
  }
  std::vector<std::uint64_t> kept;
  std::set_difference(edges.codes().begin(), edges.codes().end(), bad.codes().begin(),
                      bad.codes().end(), std::back_inserter(kept));
  EdgeSet kept_set(edges.points(), edges.arity(), std::move(kept));
  auto witness = find_box_witness(kept_set);
  return Deletion{std::move(kept_set), std::move(witness)};
}

Instance run_instance(const Params& params, std::vector<MultilinearForm> forms,
                      const Budget& budget) {
  EdgeSet edges = build_edge_set(params, forms, budget);
  BoxFamily boxes = find_boxes(params, forms, budget);
  LineFamily lines = lines_of_boxes(params, boxes);
  if (lines.size() * params.line_product_size() != boxes.size()) {
    throw VerificationError("|L| q^d (q-1)^d = " +
                            std::to_string(lines.size() * params.line_product_size()) +
                            " but |F| = " + std::to_string(boxes.size()));
  }
  const bool direct = direct_check_applies(params, edges, budget);
  EdgeSet bad = bad_edges(params, edges, lines, budget);
  Deletion del = delete_and_verify(edges, bad);
  if (del.witness) throw VerificationError("a box survived deletion");
  return Instance{std::move(forms), std::move(edges),    std::move(boxes), std::move(lines),
                  std::move(bad),   std::move(del.kept), direct};
}

}  // namespace boxlb
