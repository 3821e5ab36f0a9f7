#include "boxlb/rational.hpp"

namespace boxlb {

std::string truncate_decimal(const Rational& value, int places) {
  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  const bool negative = num < 0;
  const BigInt scaled = (negative ? BigInt(-num) : num) * scale / den;
  const BigInt whole = scaled / scale;
  std::string frac = BigInt(scaled % scale).str();
  frac.insert(0, static_cast<std::size_t>(places) - frac.size(), '0');
  std::string out = (negative ? "-" : "") + whole.str();
  if (places > 0) out += "." + frac;
  return out;
}

std::string exact_string(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  for (int places = 1; places <= 18; ++places) {
    BigInt scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    if ((num * scale) % den == 0) {
      return truncate_decimal(value, places);
    }
  }
  return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace boxlb
