// SPDX-License-Identifier: Apache-2.0

#ifndef MECHLAB_RATIONAL_H_
#define MECHLAB_RATIONAL_H_

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace mechlab {

// Arbitrary-precision rational used wherever results must be exact.
using Rational = boost::multiprecision::cpp_rational;

// "p/q", or "p" for integers.
std::string ToString(const Rational& r);

// Accepts "p", "p/q" and "-p/q". Throws kSchema on malformed text.
Rational ParseRational(const std::string& text);

double ToDouble(const Rational& r);

}  // namespace mechlab

#endif  // MECHLAB_RATIONAL_H_
