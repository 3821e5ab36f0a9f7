#pragma once

// Exponent calculators for lower and upper bounds on ex_d(n, K_{2,...,2}).
// A value alpha stands for a bound of the form n^(d - 1/alpha).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boxlb/rational.hpp"

namespace boxlb {

/// 2^(d-1): the classical upper bound exponent.
Rational upper_alpha(int d);

/// (2^d - 1)/d: random hypergraph plus deletion. Throws for d < 2.
Rational deletion_alpha(int d);

struct GrsAlpha {
  BigInt s;
  Rational alpha;
};

/// Smallest s >= 1 with s*d = 1 (mod 2^d - 1) and alpha = s(2^d-1)/(sd-1);
/// absent iff gcd(d, 2^d - 1) > 1.
std::optional<GrsAlpha> grs_alpha(int d);

struct NewAlpha {
  BigInt r;
  BigInt s;
  Rational alpha;
};

/// Exact test of d(s - 1) < (2^d - 1) r.
bool check_params(int d, const BigInt& r, const BigInt& s);

/// Largest s admissible for a given r.
BigInt max_s_for(int d, const BigInt& r);

/// The (r, s) maximizing s/r over 1 <= r <= r_max in the admissible region;
/// ties go to the smaller r.
NewAlpha new_alpha(int d, std::uint64_t r_max = 1);

struct BoundsRow {
  int d = 0;
  Rational alpha_upper;
  Rational alpha_deletion;
  std::optional<GrsAlpha> grs;
  NewAlpha best;
};

/// Throws std::invalid_argument unless 2 <= d_min <= d_max.
std::vector<BoundsRow> comparison_table(int d_min, int d_max, std::uint64_t r_max = 1);

}  // namespace boxlb
