#pragma once

// Multilinear forms T : V_1 x ... x V_d -> F_q stored as dense coefficient
// arrays in row-major multi-index order (slot 1 most significant).

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "boxlb/gf.hpp"
#include "boxlb/random.hpp"

namespace boxlb {

class MultilinearForm {
 public:
  /// Throws FieldError if arity < 2, a dimension is zero, the coefficient
  /// count differs from the product of dims, or a coefficient is not a field
  /// element.
  MultilinearForm(Field field, std::vector<std::size_t> dims, std::vector<Scalar> coeffs);

  static MultilinearForm zero(Field field, std::vector<std::size_t> dims);

  const Field& field() const { return field_; }
  std::size_t arity() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<Scalar>& coeffs() const { return coeffs_; }

  std::size_t flat_index(std::span<const std::size_t> index) const;
  Scalar coeff(std::span<const std::size_t> index) const { return coeffs_[flat_index(index)]; }

  bool operator==(const MultilinearForm& other) const {
    return field_ == other.field_ && dims_ == other.dims_ && coeffs_ == other.coeffs_;
  }

 private:
  Field field_;
  std::vector<std::size_t> dims_;
  std::vector<Scalar> coeffs_;
};

std::size_t coefficient_count(std::span<const std::size_t> dims);

/// Every coefficient independently uniform on F_q.
MultilinearForm sample_uniform(const Field& field, std::vector<std::size_t> dims, Rng& rng);

/// The form whose coefficient array is the base-q expansion of `index`
/// (first coefficient most significant). Enumerates the whole tensor space
/// as index runs over [0, q^(m_1...m_d)).
MultilinearForm form_from_index(const Field& field, std::vector<std::size_t> dims,
                                std::uint64_t index);

Scalar evaluate(const MultilinearForm& form, std::span<const Vector> args);

/// Linearly independent vectors spanning a subspace of one slot's space.
class SubspaceBasis {
 public:
  /// Throws FieldError if the vectors are dependent or of mixed dimension.
  SubspaceBasis(const Field& field, std::vector<Vector> vectors);

  const std::vector<Vector>& vectors() const { return vectors_; }
  std::size_t dim() const { return vectors_.size(); }
  std::size_t ambient_dim() const { return vectors_.front().size(); }

 private:
  std::vector<Vector> vectors_;
};

/// The restriction of `form` to U_1 x ... x U_d, written in the given bases:
/// coefficient (i_1..i_d) is form(u^(1)_{i_1}, ..., u^(d)_{i_d}).
MultilinearForm restrict(const MultilinearForm& form, std::span<const SubspaceBasis> bases);

/// The unique form on span{v_j^0, v_j^1} (j = 1..d) equal to one on all 2^d
/// corner tuples. In corner coordinates its coefficient array is all ones;
/// evaluate_at maps ambient points into those coordinates first.
class CornerInterpolant {
 public:
  CornerInterpolant(const Field& field, std::vector<std::pair<Vector, Vector>> pairs);

  const MultilinearForm& form() const { return form_; }
  const std::vector<std::pair<Vector, Vector>>& pairs() const { return pairs_; }

  /// Throws FieldError if some point is outside its slot's span.
  Scalar evaluate_at(std::span<const Vector> points) const;

 private:
  std::vector<std::pair<Vector, Vector>> pairs_;
  MultilinearForm form_;
};

CornerInterpolant corner_interpolant(const Field& field,
                                     std::vector<std::pair<Vector, Vector>> pairs);

// Text serialization. One header line followed by one line of scalars:
//
//   boxlb.form.v1 p=3 k=1 modulus=0,1 d=2 dims=2,2
//   0 1 2 0
//
// Scalars are canonical element codes (sum of c_i p^i). See docs/formats.md.
void write_form(std::ostream& os, const MultilinearForm& form);
std::string form_to_string(const MultilinearForm& form);
/// Throws FieldError on malformed input.
MultilinearForm read_form(std::istream& is);

}  // namespace boxlb
