#pragma once

// Exact arithmetic in GF(p^k) and the small amount of linear algebra the
// construction needs: vectors, 2-vector independence, rank, affine lines.
//
// Field elements are stored as canonical integers: the element
// c_0 + c_1 x + ... + c_{k-1} x^{k-1} is encoded as sum c_i p^i. Every Scalar
// handed out by a Field is fully reduced, so structural equality is field
// equality.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace boxlb {

struct Scalar {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const Scalar&) const = default;
};

class FieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

bool is_prime(std::uint64_t n);

/// Polynomials over GF(p), coefficients from the constant term upwards.
using Polynomial = std::vector<std::uint32_t>;

bool is_irreducible(const Polynomial& poly, std::uint32_t p);

/// Smallest monic irreducible polynomial of degree k over GF(p), ordering
/// candidates by their base-p encoding with the constant term least
/// significant.
Polynomial default_modulus(std::uint32_t p, std::uint32_t k);

/// A finite field GF(p^k). Cheap to copy; all copies share one immutable
/// table set.
class Field {
 public:
  /// Largest supported field order.
  static constexpr std::uint32_t kMaxOrder = 1u << 16;

  static Field make(std::uint32_t p, std::uint32_t k,
                    std::optional<Polynomial> modulus = std::nullopt);

  std::uint32_t characteristic() const { return data_->p; }
  std::uint32_t degree() const { return data_->k; }
  std::uint32_t order() const { return data_->q; }
  const Polynomial& modulus() const { return data_->modulus; }

  Scalar zero() const { return Scalar{0}; }
  Scalar one() const { return Scalar{1}; }
  bool contains(Scalar a) const { return a.value < data_->q; }

  /// The i-th element in canonical order, i in [0, q).
  Scalar element(std::uint32_t i) const;
  Scalar from_coefficients(std::span<const std::uint32_t> coeffs) const;
  std::vector<std::uint32_t> coefficients(Scalar a) const;

  Scalar add(Scalar a, Scalar b) const {
    if (!data_->add_table.empty()) {
      return Scalar{data_->add_table[a.value * data_->q + b.value]};
    }
    return add_digits(a, b);
  }
  Scalar neg(Scalar a) const { return Scalar{data_->neg_table[a.value]}; }
  Scalar sub(Scalar a, Scalar b) const { return add(a, neg(b)); }
  Scalar mul(Scalar a, Scalar b) const {
    if (a.value == 0 || b.value == 0) return Scalar{0};
    return Scalar{data_->exp_table[data_->log_table[a.value] + data_->log_table[b.value]]};
  }
  /// Throws FieldError on zero.
  Scalar inv(Scalar a) const;
  Scalar div(Scalar a, Scalar b) const { return mul(a, inv(b)); }

  /// Same characteristic, degree and reduction polynomial.
  bool operator==(const Field& other) const;

  std::string describe() const;

 private:
  struct Data {
    std::uint32_t p = 0;
    std::uint32_t k = 0;
    std::uint32_t q = 0;
    Polynomial modulus;
    std::vector<std::uint32_t> add_table;  // only for small q
    std::vector<std::uint32_t> neg_table;
    std::vector<std::uint32_t> exp_table;  // length 2(q-1)
    std::vector<std::uint32_t> log_table;  // length q
  };

  explicit Field(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  Scalar add_digits(Scalar a, Scalar b) const;

  std::shared_ptr<const Data> data_;
};

enum class ScalarOp { add, sub, mul, inv, neg };

/// Checked single-operation entry point. Rejects operands that are not
/// canonical elements of `field`, a missing second operand for binary
/// operations, and inversion of zero.
Scalar scalar_arith(const Field& field, ScalarOp op, Scalar a,
                    std::optional<Scalar> b = std::nullopt);

using Vector = std::vector<Scalar>;

Vector zero_vector(std::size_t dim);
bool is_zero(const Vector& v);
Vector add(const Field& field, const Vector& a, const Vector& b);
Vector sub(const Field& field, const Vector& a, const Vector& b);
Vector scale(const Field& field, Scalar c, const Vector& v);

/// True iff no nontrivial (lambda, mu) has lambda*v + mu*w = 0.
bool linearly_independent(const Field& field, const Vector& v, const Vector& w);

/// Rank of the matrix whose rows are `rows`, by Gaussian elimination.
std::size_t rank(const Field& field, std::span<const Vector> rows);

/// Coordinates (a, b) with a*v0 + b*v1 = u, if u lies in span{v0, v1}.
/// v0 and v1 must be linearly independent.
std::optional<std::pair<Scalar, Scalar>> coordinates_in_pair(const Field& field,
                                                             const Vector& v0,
                                                             const Vector& v1,
                                                             const Vector& u);

/// An affine line in canonical form: `base` is the lexicographically
/// smallest point and `direction` has first nonzero coordinate equal to one.
struct AffineLine {
  Vector base;
  Vector direction;

  bool operator==(const AffineLine&) const = default;
  auto operator<=>(const AffineLine&) const = default;
};

/// Throws FieldError if p0 == p1 or dimensions differ.
AffineLine affine_line_through(const Field& field, const Vector& p0, const Vector& p1);

/// The q points base + t*direction, in canonical order of t.
std::vector<Vector> line_points(const Field& field, const AffineLine& line);

/// F_q^dim with every vector packed into a single integer: coordinate 0 is
/// the most significant base-q digit, so integer order is lexicographic order.
/// Coordinates of all q^dim points are tabulated up front.
class VectorSpace {
 public:
  using Point = std::uint32_t;

  static constexpr std::uint64_t kMaxPoints = 1u << 24;

  VectorSpace(Field field, std::size_t dim);

  const Field& field() const { return field_; }
  std::size_t dim() const { return dim_; }
  std::uint32_t size() const { return size_; }

  Point pack(const Vector& v) const;
  Vector unpack(Point p) const;
  std::span<const Scalar> coords(Point p) const {
    return {coords_.data() + static_cast<std::size_t>(p) * dim_, dim_};
  }

  Point add(Point a, Point b) const;
  Point sub(Point a, Point b) const;
  Point scale(Scalar c, Point a) const;
  bool independent(Point a, Point b) const;

  /// Canonical (base, direction) of the line through two distinct points.
  std::pair<Point, Point> canonical_line(Point a, Point b) const;

  /// Bitset of {x : u.x = 1}, reading u as a functional; level_set_words()
  /// 64-bit words, least significant bit is point 0. Tabulated only for
  /// spaces of at most kLevelSetLimit points (level_set_words() == 0 otherwise).
  static constexpr std::uint32_t kLevelSetLimit = 256;
  std::size_t level_set_words() const { return level_words_; }
  const std::uint64_t* ones(Point u) const { return ones_.data() + static_cast<std::size_t>(u) * level_words_; }

 private:
  static constexpr std::uint32_t kAddTableLimit = 1024;
  static constexpr std::uint64_t kScaleTableLimit = 1u << 20;
  Field field_;
  std::size_t dim_;
  std::uint32_t size_;
  std::vector<Scalar> coords_;
  std::vector<Point> add_table_;  // only for small spaces
  std::vector<Point> neg_table_;
  std::vector<Point> scale_table_;
  std::size_t level_words_ = 0;
  std::vector<std::uint64_t> ones_;
};

}  // namespace boxlb
