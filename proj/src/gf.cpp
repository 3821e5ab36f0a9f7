#include "boxlb/gf.hpp"

#include <algorithm>
#include <sstream>

namespace boxlb {
namespace {

void trim(Polynomial& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo a monic-or-not nonzero b over GF(p).
Polynomial poly_mod(Polynomial a, const Polynomial& b, std::uint32_t p) {
  trim(a);
  const std::size_t db = b.size() - 1;
  const std::uint64_t lead_inv = [&] {
    // p is prime: b.back()^(p-2).
    std::uint64_t result = 1, base = b.back() % p;
    for (std::uint64_t e = p - 2; e > 0; e >>= 1) {
      if (e & 1) result = result * base % p;
      base = base * base % p;
    }
    return result;
  }();
  while (a.size() >= b.size()) {
    const std::size_t shift = a.size() - 1 - db;
    const std::uint64_t factor = a.back() * lead_inv % p;
    for (std::size_t i = 0; i <= db; ++i) {
      const std::uint64_t sub = factor * b[i] % p;
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - sub) % p);
    }
    trim(a);
  }
  return a;
}

Polynomial poly_mulmod(const Polynomial& a, const Polynomial& b, const Polynomial& m,
                       std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Polynomial prod(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      prod[i + j] = static_cast<std::uint32_t>(
          (prod[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
    }
  }
  return poly_mod(std::move(prod), m, p);
}

Polynomial digits_of(std::uint64_t value, std::uint32_t p, std::size_t len) {
  Polynomial out(len, 0);
  for (std::size_t i = 0; i < len; ++i) {
    out[i] = static_cast<std::uint32_t>(value % p);
    value /= p;
  }
  return out;
}

std::uint32_t value_of(const Polynomial& digits, std::uint32_t p) {
  std::uint64_t v = 0;
  for (std::size_t i = digits.size(); i-- > 0;) v = v * p + digits[i];
  return static_cast<std::uint32_t>(v);
}

std::uint64_t checked_pow(std::uint64_t base, std::uint32_t exp, std::uint64_t limit) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    if (r > limit / base) return limit + 1;
    r *= base;
  }
  return r;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t f = 2; f * f <= n; ++f) {
    if (n % f == 0) return false;
  }
  return true;
}

bool is_irreducible(const Polynomial& poly, std::uint32_t p) {
  Polynomial f = poly;
  trim(f);
  if (f.size() < 2) return false;
  const std::size_t deg = f.size() - 1;
  // Trial division by every monic polynomial of degree 1..deg/2.
  for (std::size_t d = 1; 2 * d <= deg; ++d) {
    const std::uint64_t count = checked_pow(p, static_cast<std::uint32_t>(d), UINT64_MAX / 2);
    for (std::uint64_t low = 0; low < count; ++low) {
      Polynomial g = digits_of(low, p, d);
      g.push_back(1);
      if (poly_mod(f, g, p).empty()) return false;
    }
  }
  return true;
}

Polynomial default_modulus(std::uint32_t p, std::uint32_t k) {
  const std::uint64_t count = checked_pow(p, k, UINT64_MAX / 2);
  for (std::uint64_t low = 0; low < count; ++low) {
    Polynomial g = digits_of(low, p, k);
    g.push_back(1);
    if (is_irreducible(g, p)) return g;
  }
  throw FieldError("no irreducible polynomial found");  // unreachable for prime p
}

Field Field::make(std::uint32_t p, std::uint32_t k, std::optional<Polynomial> modulus) {
  if (!is_prime(p)) throw FieldError("characteristic " + std::to_string(p) + " is not prime");
  if (k < 1) throw FieldError("extension degree must be at least 1");
  const std::uint64_t q = checked_pow(p, k, kMaxOrder);
  if (q > kMaxOrder) throw FieldError("field order exceeds " + std::to_string(kMaxOrder));

  Polynomial m;
  if (modulus) {
    m = *modulus;
    if (m.size() != k + 1 || m.back() != 1) {
      throw FieldError("modulus must be monic of degree " + std::to_string(k));
    }
    for (auto c : m) {
      if (c >= p) throw FieldError("modulus coefficient out of range");
    }
    if (!is_irreducible(m, p)) throw FieldError("modulus is reducible");
  } else {
    m = default_modulus(p, k);
  }

  auto data = std::make_shared<Data>();
  data->p = p;
  data->k = k;
  data->q = static_cast<std::uint32_t>(q);
  data->modulus = m;

  data->neg_table.resize(q);
  for (std::uint32_t a = 0; a < q; ++a) {
    Polynomial d = digits_of(a, p, k);
    for (auto& c : d) c = (p - c) % p;
    data->neg_table[a] = value_of(d, p);
  }

  // Find a primitive element and tabulate its powers.
  const std::uint32_t n = data->q - 1;
  data->log_table.assign(q, 0);
  for (std::uint32_t g = 1; g < q; ++g) {
    std::vector<std::uint32_t> powers;
    powers.reserve(n);
    const Polynomial gp = digits_of(g, p, k);
    Polynomial cur{1};
    std::uint32_t order = 0;
    do {
      Polynomial padded = cur;
      padded.resize(k, 0);
      powers.push_back(value_of(padded, p));
      cur = poly_mulmod(cur, gp, m, p);
      ++order;
      if (cur.size() == 1 && cur[0] == 1) break;
    } while (order <= n);
    if (order != n) continue;
    data->exp_table.resize(2 * static_cast<std::size_t>(n));
    for (std::uint32_t i = 0; i < 2 * n; ++i) data->exp_table[i] = powers[i % n];
    for (std::uint32_t i = 0; i < n; ++i) data->log_table[powers[i]] = i;
    break;
  }

  Field field(data);
  if (q <= 256) {
    data->add_table.resize(q * q);
    for (std::uint32_t a = 0; a < q; ++a) {
      for (std::uint32_t b = 0; b < q; ++b) {
        data->add_table[a * q + b] = field.add_digits(Scalar{a}, Scalar{b}).value;
      }
    }
  }
  return field;
}

Scalar Field::add_digits(Scalar a, Scalar b) const {
  const std::uint32_t p = data_->p;
  if (data_->k == 1) return Scalar{(a.value + b.value) % p};
  std::uint32_t x = a.value, y = b.value, out = 0, place = 1;
  for (std::uint32_t i = 0; i < data_->k; ++i) {
    out += ((x % p + y % p) % p) * place;
    x /= p;
    y /= p;
    place *= p;
  }
  return Scalar{out};
}

Scalar Field::element(std::uint32_t i) const {
  if (i >= data_->q) throw FieldError("element index out of range");
  return Scalar{i};
}

Scalar Field::from_coefficients(std::span<const std::uint32_t> coeffs) const {
  if (coeffs.size() > data_->k) throw FieldError("too many coefficients");
  Polynomial d(coeffs.begin(), coeffs.end());
  for (auto c : d) {
    if (c >= data_->p) throw FieldError("coefficient out of range");
  }
  return Scalar{value_of(d, data_->p)};
}

std::vector<std::uint32_t> Field::coefficients(Scalar a) const {
  return digits_of(a.value, data_->p, data_->k);
}

Scalar Field::inv(Scalar a) const {
  if (a.value == 0) throw FieldError("inversion of zero");
  const std::uint32_t n = data_->q - 1;
  return Scalar{data_->exp_table[(n - data_->log_table[a.value]) % n]};
}

bool Field::operator==(const Field& other) const {
  if (data_ == other.data_) return true;
  return data_->p == other.data_->p && data_->k == other.data_->k &&
         data_->modulus == other.data_->modulus;
}

std::string Field::describe() const {
  std::ostringstream os;
  os << "GF(" << data_->p;
  if (data_->k > 1) os << '^' << data_->k;
  os << ')';
  return os.str();
}

Scalar scalar_arith(const Field& field, ScalarOp op, Scalar a, std::optional<Scalar> b) {
  if (!field.contains(a) || (b && !field.contains(*b))) {
    throw FieldError("operand is not an element of " + field.describe());
  }
  const bool binary = op == ScalarOp::add || op == ScalarOp::sub || op == ScalarOp::mul;
  if (binary && !b) throw FieldError("binary operation needs two operands");
  switch (op) {
    case ScalarOp::add:
      return field.add(a, *b);
    case ScalarOp::sub:
      return field.sub(a, *b);
    case ScalarOp::mul:
      return field.mul(a, *b);
    case ScalarOp::inv:
      return field.inv(a);
    case ScalarOp::neg:
      return field.neg(a);
  }
  throw FieldError("unknown operation");
}

Vector zero_vector(std::size_t dim) { return Vector(dim, Scalar{0}); }

bool is_zero(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](Scalar s) { return s.value == 0; });
}

namespace {
void require_same_dim(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw FieldError("dimension mismatch");
}
}  // namespace

Vector add(const Field& field, const Vector& a, const Vector& b) {
  require_same_dim(a, b);
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = field.add(a[i], b[i]);
  return out;
}

Vector sub(const Field& field, const Vector& a, const Vector& b) {
  require_same_dim(a, b);
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = field.sub(a[i], b[i]);
  return out;
}

Vector scale(const Field& field, Scalar c, const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = field.mul(c, v[i]);
  return out;
}

bool linearly_independent(const Field& field, const Vector& v, const Vector& w) {
  require_same_dim(v, w);
  const Vector rows[] = {v, w};
  return rank(field, rows) == 2;
}

std::size_t rank(const Field& field, std::span<const Vector> rows) {
  if (rows.empty()) return 0;
  std::vector<Vector> m(rows.begin(), rows.end());
  const std::size_t cols = m.front().size();
  for (const auto& r : m) {
    if (r.size() != cols) throw FieldError("dimension mismatch");
  }
  std::size_t rk = 0;
  for (std::size_t c = 0; c < cols && rk < m.size(); ++c) {
    std::size_t pivot = rk;
    while (pivot < m.size() && m[pivot][c].value == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[rk], m[pivot]);
    const Scalar inv = field.inv(m[rk][c]);
    for (std::size_t r = rk + 1; r < m.size(); ++r) {
      if (m[r][c].value == 0) continue;
      const Scalar f = field.mul(m[r][c], inv);
      for (std::size_t j = c; j < cols; ++j) {
        m[r][j] = field.sub(m[r][j], field.mul(f, m[rk][j]));
      }
    }
    ++rk;
  }
  return rk;
}

std::optional<std::pair<Scalar, Scalar>> coordinates_in_pair(const Field& field,
                                                             const Vector& v0,
                                                             const Vector& v1,
                                                             const Vector& u) {
  require_same_dim(v0, v1);
  require_same_dim(v0, u);
  // Pick two coordinates where [v0 v1] is invertible and solve by Cramer.
  for (std::size_t i = 0; i < v0.size(); ++i) {
    for (std::size_t j = i + 1; j < v0.size(); ++j) {
      const Scalar det = field.sub(field.mul(v0[i], v1[j]), field.mul(v1[i], v0[j]));
      if (det.value == 0) continue;
      const Scalar inv = field.inv(det);
      const Scalar a = field.mul(inv, field.sub(field.mul(u[i], v1[j]), field.mul(v1[i], u[j])));
      const Scalar b = field.mul(inv, field.sub(field.mul(v0[i], u[j]), field.mul(u[i], v0[j])));
      const Vector back = add(field, scale(field, a, v0), scale(field, b, v1));
      if (back != u) return std::nullopt;
      return std::pair{a, b};
    }
  }
  throw FieldError("basis vectors are linearly dependent");
}

AffineLine affine_line_through(const Field& field, const Vector& p0, const Vector& p1) {
  require_same_dim(p0, p1);
  if (p0 == p1) throw FieldError("a line needs two distinct points");
  Vector dir = sub(field, p1, p0);
  std::size_t lead = 0;
  while (dir[lead].value == 0) ++lead;
  dir = scale(field, field.inv(dir[lead]), dir);
  // Zeroing the leading coordinate gives the lexicographically smallest point:
  // earlier coordinates are constant along the line.
  Vector base = sub(field, p0, scale(field, p0[lead], dir));
  return AffineLine{std::move(base), std::move(dir)};
}

std::vector<Vector> line_points(const Field& field, const AffineLine& line) {
  std::vector<Vector> out;
  out.reserve(field.order());
  for (std::uint32_t t = 0; t < field.order(); ++t) {
    out.push_back(add(field, line.base, scale(field, field.element(t), line.direction)));
  }
  return out;
}

VectorSpace::VectorSpace(Field field, std::size_t dim) : field_(std::move(field)), dim_(dim) {
  if (dim == 0) throw FieldError("vector space dimension must be positive");
  const std::uint64_t n = checked_pow(field_.order(), static_cast<std::uint32_t>(dim), kMaxPoints);
  if (n > kMaxPoints) throw FieldError("vector space too large to tabulate");
  size_ = static_cast<std::uint32_t>(n);
  coords_.resize(static_cast<std::size_t>(size_) * dim_);
  const std::uint32_t q = field_.order();
  for (std::uint32_t p = 0; p < size_; ++p) {
    std::uint32_t rest = p;
    for (std::size_t i = dim_; i-- > 0;) {
      coords_[static_cast<std::size_t>(p) * dim_ + i] = Scalar{rest % q};
      rest /= q;
    }
  }
  if (static_cast<std::uint64_t>(size_) * q <= kScaleTableLimit) {
    std::vector<Point> scaled(static_cast<std::size_t>(size_) * q);
    for (std::uint32_t c = 0; c < q; ++c) {
      for (Point a = 0; a < size_; ++a) scaled[static_cast<std::size_t>(c) * size_ + a] = scale(Scalar{c}, a);
    }
    scale_table_ = std::move(scaled);
  }
  if (size_ <= kAddTableLimit) {
    std::vector<Point> sums(static_cast<std::size_t>(size_) * size_), negs(size_);
    for (Point a = 0; a < size_; ++a) {
      for (Point b = 0; b < size_; ++b) sums[static_cast<std::size_t>(a) * size_ + b] = add(a, b);
    }
    for (Point a = 0; a < size_; ++a) negs[a] = sub(0, a);
    add_table_ = std::move(sums);
    neg_table_ = std::move(negs);
  }
  if (size_ <= kLevelSetLimit) {
    level_words_ = (size_ + 63) / 64;
    ones_.assign(static_cast<std::size_t>(size_) * level_words_, 0);
    for (Point u = 0; u < size_; ++u) {
      const auto cu = coords(u);
      for (Point x = 0; x < size_; ++x) {
        const auto cx = coords(x);
        Scalar dot = field_.zero();
        for (std::size_t i = 0; i < dim_; ++i) dot = field_.add(dot, field_.mul(cu[i], cx[i]));
        if (dot == field_.one()) ones_[u * level_words_ + x / 64] |= std::uint64_t{1} << (x % 64);
      }
    }
  }
}

VectorSpace::Point VectorSpace::pack(const Vector& v) const {
  if (v.size() != dim_) throw FieldError("dimension mismatch");
  std::uint32_t id = 0;
  for (auto s : v) {
    if (!field_.contains(s)) throw FieldError("coordinate is not a field element");
    id = id * field_.order() + s.value;
  }
  return id;
}

Vector VectorSpace::unpack(Point p) const {
  auto c = coords(p);
  return Vector(c.begin(), c.end());
}

VectorSpace::Point VectorSpace::add(Point a, Point b) const {
  if (!add_table_.empty()) return add_table_[static_cast<std::size_t>(a) * size_ + b];
  auto x = coords(a), y = coords(b);
  std::uint32_t id = 0;
  for (std::size_t i = 0; i < dim_; ++i) id = id * field_.order() + field_.add(x[i], y[i]).value;
  return id;
}

VectorSpace::Point VectorSpace::sub(Point a, Point b) const {
  if (!add_table_.empty()) return add_table_[static_cast<std::size_t>(a) * size_ + neg_table_[b]];
  auto x = coords(a), y = coords(b);
  std::uint32_t id = 0;
  for (std::size_t i = 0; i < dim_; ++i) id = id * field_.order() + field_.sub(x[i], y[i]).value;
  return id;
}

VectorSpace::Point VectorSpace::scale(Scalar c, Point a) const {
  if (!scale_table_.empty()) return scale_table_[static_cast<std::size_t>(c.value) * size_ + a];
  auto x = coords(a);
  std::uint32_t id = 0;
  for (std::size_t i = 0; i < dim_; ++i) id = id * field_.order() + field_.mul(c, x[i]).value;
  return id;
}

bool VectorSpace::independent(Point a, Point b) const {
  if (a == 0 || b == 0) return false;
  auto x = coords(a), y = coords(b);
  std::size_t lead = 0;
  while (x[lead].value == 0) ++lead;
  const Scalar lambda = field_.div(y[lead], x[lead]);
  for (std::size_t i = 0; i < dim_; ++i) {
    if (field_.mul(lambda, x[i]) != y[i]) return true;
  }
  return false;
}

std::pair<VectorSpace::Point, VectorSpace::Point> VectorSpace::canonical_line(Point a,
                                                                               Point b) const {
  if (a == b) throw FieldError("a line needs two distinct points");
  const Point diff = sub(b, a);
  auto d = coords(diff);
  std::size_t lead = 0;
  while (d[lead].value == 0) ++lead;
  const Point dir = scale(field_.inv(d[lead]), diff);
  const Point base = sub(a, scale(coords(a)[lead], dir));
  return {base, dir};
}

}  // namespace boxlb
