// SPDX-License-Identifier: Apache-2.0

#include "mechlab/rational.h"

#include "mechlab/error.h"

namespace mechlab {

std::string ToString(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational ParseRational(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
      return Rational(boost::multiprecision::cpp_int(text));
    }
    const boost::multiprecision::cpp_int num(text.substr(0, slash));
    const boost::multiprecision::cpp_int den(text.substr(slash + 1));
    if (den == 0) throw Error(ErrorCode::kSchema, "zero denominator in " + text);
    return Rational(num, den);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const Error*>(&e)) throw;
    throw Error(ErrorCode::kSchema, "malformed rational '" + text + "'");
  }
}

double ToDouble(const Rational& r) { return r.convert_to<double>(); }

}  // namespace mechlab
