#include "lvpir/rational.hpp"

#include <cctype>
#include <cstddef>

#include "lvpir/errors.hpp"

namespace lvpir {

Rational make_rational(const Int& num, const Int& den) {
  if (den == 0) throw ParseError("rational with zero denominator");
  if (den < 0) return Rational(-num, -den);
  return Rational(num, den);  // cpp_rational canonicalizes
}

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational_literal(const std::string& token) {
  if (token.empty()) throw ParseError("empty numeric token");
  std::string body = token;
  bool negative = false;
  if (body[0] == '+' || body[0] == '-') {
    negative = body[0] == '-';
    body = body.substr(1);
  }

  if (auto slash = body.find('/'); slash != std::string::npos) {
    std::string num = body.substr(0, slash);
    std::string den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw ParseError("malformed fraction literal '" + token + "'");
    Rational r = make_rational(Int(num), Int(den));
    return negative ? -r : r;
  }

  std::string int_part = body;
  std::string frac_part;
  if (auto dot = body.find('.'); dot != std::string::npos) {
    int_part = body.substr(0, dot);
    frac_part = body.substr(dot + 1);
    if (frac_part.empty()) throw ParseError("malformed decimal literal '" + token + "'");
  }
  if (!all_digits(int_part) || (!frac_part.empty() && !all_digits(frac_part)))
    throw ParseError("malformed numeric token '" + token + "'");

  Int scale = 1;
  for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
  Int num = Int(int_part) * scale + (frac_part.empty() ? Int(0) : Int(frac_part));
  Rational r = make_rational(num, scale);
  return negative ? -r : r;
}

std::string format_fraction(const Rational& r) {
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}

std::string format_rational(const Rational& r) {
  if (denominator_of(r) == 1) return numerator_of(r).str();
  return format_fraction(r);
}

}  // namespace lvpir
