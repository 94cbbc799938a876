#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace lvpir {

// All probabilities and costs are exact rationals over arbitrary-precision
// integers. Privacy verdicts are integer equalities, never float tolerances.
using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Int denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

// num/den in canonical form (den > 0, gcd 1); throws ParseError on den == 0.
Rational make_rational(const Int& num, const Int& den);

// Accepts decimal literals ("0.3", "2", "1.25") and fraction literals
// ("3/10"). Decimals convert exactly: "0.3" becomes 3/10, not a float.
Rational parse_rational_literal(const std::string& token);

// Always "num/den", e.g. "1/2", "1/1", "0/1". Inverse of the fraction form
// accepted by parse_rational_literal.
std::string format_fraction(const Rational& r);

// "5/3" for non-integers, "2" for integers. Human-facing output only.
std::string format_rational(const Rational& r);

inline double rational_to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace lvpir
