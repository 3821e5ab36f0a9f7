#pragma once

#include <cstdint>
#include <vector>

#include "boxlb/construct.hpp"
#include "boxlb/rational.hpp"

namespace boxlb {

enum class Mode { exact, sampled };

struct TrialRecord {
  std::uint64_t index = 0;
  std::uint64_t edges = 0;
  std::uint64_t boxes = 0;
  std::uint64_t lines = 0;
  std::uint64_t bad = 0;
  std::uint64_t kept = 0;
  bool box_free = false;
  /// |E'| >= (1 - delta) q^(ds - r).
  bool meets_target = false;
};

struct Moments {
  BigInt sum = 0;
  BigInt sum_squares = 0;
  std::uint64_t count = 0;

  void add(std::uint64_t x) {
    sum += x;
    sum_squares += BigInt(x) * x;
    ++count;
  }
  Rational mean() const { return count ? Rational(sum, count) : Rational(0); }
  /// Unbiased sample variance.
  double variance() const;
  double std_error() const;
  /// (mean - expected) / std_error; 0 when the standard error vanishes and the
  /// mean is exact, +-inf when it vanishes and the mean is off.
  double z_score(const Rational& expected) const;
};

struct TrialStats {
  Mode mode = Mode::sampled;
  std::uint64_t seed = 0;
  double delta = 0.5;
  std::vector<TrialRecord> records;

  Moments edges, boxes, lines, bad, kept;
  std::uint64_t box_free = 0;
  std::uint64_t meets_target = 0;
  /// Number of trials where the brute-force bad-set cross-check ran.
  std::uint64_t direct_checked = 0;

  Rational expected_edges;
  Rational expected_boxes;
  /// E|F| / (q-1)^d, the bound on E|B|.
  Rational bad_bound;
  Rational target_edges;

  /// mean|B| / mean|E|, or 0 when no edges were seen.
  double bad_fraction() const;
};

struct TrialOptions {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  Mode mode = Mode::sampled;
  double delta = 0.5;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
  Budget budget;
};

/// Exact mode ignores `trials` and `seed` and visits every form tuple of the
/// tensor space once, in index order; sampled mode runs trial i on forms drawn
/// from Rng::stream(seed, i). Records are in trial-index order. Throws
/// BudgetExceeded or VerificationError.
TrialStats run_trials(const Params& params, const TrialOptions& options);

/// q^(r s^d), or UINT64_MAX when it does not fit.
std::uint64_t tensor_space_size(const Params& params);

}  // namespace boxlb
