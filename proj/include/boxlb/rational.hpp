#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace boxlb {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Decimal rendering truncated (toward zero) to `places` digits.
std::string truncate_decimal(const Rational& value, int places);

/// Shortest decimal if the value terminates within 18 places, else "num/den".
std::string exact_string(const Rational& value);

double to_double(const Rational& value);

}  // namespace boxlb
