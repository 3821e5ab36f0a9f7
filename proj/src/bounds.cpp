#include "boxlb/bounds.hpp"

#include <stdexcept>

namespace boxlb {
namespace {

void require_uniformity(int d) {
  if (d < 2) throw std::invalid_argument("uniformity d must be at least 2");
}

BigInt mersenne(int d) { return (BigInt(1) << d) - 1; }

// Extended Euclid; returns gcd and sets x with a*x = gcd (mod m).
BigInt ext_gcd(const BigInt& a, const BigInt& b, BigInt& x) {
  BigInt old_r = a, r = b, old_s = 1, s = 0;
  while (r != 0) {
    const BigInt quot = old_r / r;
    BigInt tmp = old_r - quot * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quot * s;
    old_s = s;
    s = tmp;
  }
  x = old_s;
  return old_r;
}

}  // namespace

Rational upper_alpha(int d) {
  require_uniformity(d);
  return Rational(BigInt(1) << (d - 1));
}

Rational deletion_alpha(int d) {
  require_uniformity(d);
  return Rational(mersenne(d), BigInt(d));
}

std::optional<GrsAlpha> grs_alpha(int d) {
  require_uniformity(d);
  const BigInt m = mersenne(d);
  BigInt inv;
  if (ext_gcd(BigInt(d), m, inv) != 1) return std::nullopt;
  BigInt s = inv % m;
  if (s <= 0) s += m;
  return GrsAlpha{s, Rational(s * m, s * d - 1)};
}

bool check_params(int d, const BigInt& r, const BigInt& s) {
  require_uniformity(d);
  if (r < 1 || s < 1) throw std::invalid_argument("r and s must be positive");
  return BigInt(d) * (s - 1) < mersenne(d) * r;
}

BigInt max_s_for(int d, const BigInt& r) {
  require_uniformity(d);
  // d(s-1) < M r  <=>  s - 1 <= (M r - 1) / d.
  return (mersenne(d) * r - 1) / d + 1;
}

NewAlpha new_alpha(int d, std::uint64_t r_max) {
  require_uniformity(d);
  if (r_max < 1) throw std::invalid_argument("r_max must be at least 1");
  NewAlpha best{1, max_s_for(d, 1), Rational(max_s_for(d, 1))};
  for (std::uint64_t r = 2; r <= r_max; ++r) {
    const BigInt s = max_s_for(d, r);
    const Rational alpha(s, BigInt(r));
    if (alpha > best.alpha) best = NewAlpha{BigInt(r), s, alpha};
  }
  return best;
}

std::vector<BoundsRow> comparison_table(int d_min, int d_max, std::uint64_t r_max) {
  if (d_min < 2 || d_max < d_min) {
    throw std::invalid_argument("need 2 <= d_min <= d_max");
  }
  std::vector<BoundsRow> rows;
  for (int d = d_min; d <= d_max; ++d) {
    rows.push_back(BoundsRow{d, upper_alpha(d), deletion_alpha(d), grs_alpha(d), new_alpha(d, r_max)});
  }
  return rows;
}

}  // namespace boxlb
