#pragma once

// The random multilinear construction of box-free d-partite hypergraphs.
//
// Vertices of every part are the vectors of V = F_q^s, held as packed
// VectorSpace points. A d-tuple of points is packed into one 64-bit code with
// slot 1 as the most significant base-|V| digit; box witnesses and line
// tuples use 2d such digits. Collections are sorted vectors of codes.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "boxlb/gf.hpp"
#include "boxlb/random.hpp"
#include "boxlb/rational.hpp"
#include "boxlb/tensor.hpp"

namespace boxlb {

using Point = VectorSpace::Point;

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Budget {
  /// Cap on (q^s)^d edge candidates, and on the ((q^s-1)(q^s-q))^(d-1) pair
  /// prefixes visited by the box search.
  std::uint64_t tuples = 10'000'000;
  /// Cap on q^(r s^d), the number of form tuples in exact enumeration.
  std::uint64_t tensor_space = 1u << 20;
  /// Cap on |E| (q^s)^d for the brute-force bad-edge cross-check; above it
  /// the cross-check is skipped.
  std::uint64_t direct_check = 10'000'000;
};

class Params {
 public:
  /// Throws std::invalid_argument for d < 2, r < 1 or s < 1.
  static Params make(int d, int r, int s, Field field);

  int d() const { return d_; }
  int r() const { return r_; }
  int s() const { return s_; }
  const Field& field() const { return space_->field(); }
  const VectorSpace& space() const { return *space_; }
  std::uint32_t q() const { return field().order(); }
  /// q^s.
  std::uint32_t points() const { return space_->size(); }
  /// d q^s.
  std::uint64_t n() const { return static_cast<std::uint64_t>(d_) * points(); }
  /// d(s - 1) < (2^d - 1) r.
  bool theorem_regime() const;
  /// d - r/s.
  Rational target_exponent() const { return Rational(d_) - Rational(r_, s_); }
  /// d^(r/s - d).
  double leading_constant() const;

  /// Closed forms: (q^s-1)^d q^-r and (q^s-1)^d (q^s-q)^d q^(-2^d r).
  Rational expected_edges() const;
  Rational expected_boxes() const;
  /// q^(ds - r).
  Rational target_edges() const;
  /// q^d (q-1)^d, the size of each line-tuple product.
  std::uint64_t line_product_size() const;

 private:
  Params(int d, int r, int s, std::shared_ptr<const VectorSpace> space)
      : d_(d), r_(r), s_(s), space_(std::move(space)) {}

  int d_;
  int r_;
  int s_;
  std::shared_ptr<const VectorSpace> space_;
};

/// Sorted set of packed d-tuples of points.
class TupleSet {
 public:
  TupleSet(std::uint32_t points, int arity, std::vector<std::uint64_t> codes);

  std::size_t size() const { return codes_.size(); }
  bool empty() const { return codes_.empty(); }
  int arity() const { return arity_; }
  std::uint32_t points() const { return points_; }
  const std::vector<std::uint64_t>& codes() const { return codes_; }

  bool contains_code(std::uint64_t code) const;
  bool contains(std::span<const Point> tuple) const { return contains_code(encode(tuple)); }
  std::vector<Point> tuple(std::size_t i) const { return decode(codes_[i]); }

  std::uint64_t encode(std::span<const Point> tuple) const;
  std::vector<Point> decode(std::uint64_t code) const;
  /// decode() into a caller buffer of length arity().
  void decode_into(std::uint64_t code, std::span<Point> out) const {
    for (int j = arity_; j-- > 0;) {
      out[j] = static_cast<Point>(code % points_);
      code /= points_;
    }
  }

  bool operator==(const TupleSet& other) const {
    return points_ == other.points_ && arity_ == other.arity_ && codes_ == other.codes_;
  }

 private:
  std::uint32_t points_;
  int arity_;
  std::vector<std::uint64_t> codes_;
};

using EdgeSet = TupleSet;

struct BoxWitness {
  std::vector<std::pair<Point, Point>> pairs;

  /// The 2^d corners; corner c takes pairs[j].second where bit (d-1-j) of c
  /// is set.
  std::vector<std::vector<Point>> corners() const;
  /// (v_1^0, v_1^1, ..., v_d^0, v_d^1).
  std::vector<Point> flatten() const;
  static BoxWitness from_flat(std::span<const Point> flat);
};

/// The family F, stored as flattened 2d-tuples.
class BoxFamily {
 public:
  BoxFamily(std::uint32_t points, int d, std::vector<std::uint64_t> codes)
      : set_(points, 2 * d, std::move(codes)) {}

  std::size_t size() const { return set_.size(); }
  int d() const { return set_.arity() / 2; }
  const TupleSet& tuples() const { return set_; }
  BoxWitness witness(std::size_t i) const { return BoxWitness::from_flat(set_.tuple(i)); }
  bool contains(const BoxWitness& w) const { return set_.contains(w.flatten()); }

 private:
  TupleSet set_;
};

/// A canonical line as (base, direction) points; see VectorSpace::canonical_line.
struct LineKey {
  Point base = 0;
  Point direction = 0;

  bool operator==(const LineKey&) const = default;
};

struct LineTuple {
  std::vector<LineKey> lines;
};

/// The family L of line tuples, stored as flattened (base, direction) pairs.
class LineFamily {
 public:
  LineFamily(std::uint32_t points, int d, std::vector<std::uint64_t> codes)
      : set_(points, 2 * d, std::move(codes)) {}

  std::size_t size() const { return set_.size(); }
  const TupleSet& tuples() const { return set_; }
  LineTuple line_tuple(std::size_t i) const;

 private:
  TupleSet set_;
};

/// The r forms for one trial, drawn from `rng`.
std::vector<MultilinearForm> sample_forms(const Params& params, Rng& rng);
/// Form tuple number `index` in base-q^(s^d) order; index < q^(r s^d).
std::vector<MultilinearForm> forms_from_index(const Params& params, std::uint64_t index);

/// All tuples of nonzero points on which every form equals one.
EdgeSet build_edge_set(const Params& params, std::span<const MultilinearForm> forms,
                       const Budget& budget = {});

/// All (v_1^0, v_1^1, ..., v_d^0, v_d^1) with v_j^0 != v_j^1 whose 2^d
/// corners evaluate to one under every form. Only linearly independent pairs
/// are visited; the last slot is solved as an affine linear system.
BoxFamily find_boxes(const Params& params, std::span<const MultilinearForm> forms,
                     const Budget& budget = {});

/// |F| by the same search, without materializing it.
std::uint64_t count_boxes(const Params& params, std::span<const MultilinearForm> forms,
                          const Budget& budget = {});

/// Canonical line tuples through the members of F.
LineFamily lines_of_boxes(const Params& params, const BoxFamily& boxes);

/// Points of l_1 x ... x l_d.
std::vector<std::vector<Point>> line_product_points(const Params& params, const LineTuple& lt);

/// Sum over L of |P(l_1..l_d) intersect F|; equals |F| iff the products are
/// disjoint and cover F.
std::uint64_t line_product_coverage(const Params& params, const LineFamily& lines,
                                    const BoxFamily& boxes);

/// B as the union of l_1 x ... x l_d over L. Throws VerificationError if B is
/// not contained in E, or, when the direct-check budget allows, if it differs
/// from bad_edges_direct.
EdgeSet bad_edges(const Params& params, const EdgeSet& edges, const LineFamily& lines,
                  const Budget& budget = {});

/// B by definition: edges extendable to a member of F, found by brute-force
/// search over partner tuples against E alone.
EdgeSet bad_edges_direct(const Params& params, const EdgeSet& edges);

bool direct_check_applies(const Params& params, const EdgeSet& edges, const Budget& budget);

/// Purely combinatorial search for a box in a d-partite edge set.
std::optional<BoxWitness> find_box_witness(const EdgeSet& edges);

struct Deletion {
  EdgeSet kept;
  std::optional<BoxWitness> witness;
};

/// E' = E \ B and the result of find_box_witness on it. Throws
/// VerificationError if B is not a subset of E.
Deletion delete_and_verify(const EdgeSet& edges, const EdgeSet& bad);

struct Instance {
  std::vector<MultilinearForm> forms;
  EdgeSet edges;
  BoxFamily boxes;
  LineFamily lines;
  EdgeSet bad;
  EdgeSet kept;
  bool direct_checked = false;
};

/// The whole pipeline on one form tuple. Throws VerificationError if the
/// line identity |L| q^d (q-1)^d = |F| fails or a box survives deletion.
Instance run_instance(const Params& params, std::vector<MultilinearForm> forms,
                      const Budget& budget = {});

}  // namespace boxlb
