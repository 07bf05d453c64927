#include "anomalylab/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace anomalylab {

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&] { return std::invalid_argument("malformed rational '" + s + "'"); };
  if (s.empty()) throw bad();
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  bool seen_slash = false;
  bool digit_run = false;
  for (; i < s.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      digit_run = true;
    } else if (s[i] == '/' && !seen_slash && digit_run) {
      seen_slash = true;
      digit_run = false;
    } else {
      throw bad();
    }
  }
  if (!digit_run) throw bad();
  std::string body = s[0] == '+' ? s.substr(1) : s;
  if (seen_slash && body.substr(body.find('/') + 1).find_first_not_of('0') == std::string::npos)
    throw std::invalid_argument("zero denominator in '" + s + "'");
  Rational q(body);
  q.canonicalize();
  return q;
}

Rational binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Rational r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

Rational power(const Rational& q, int e) {
  Rational r = 1;
  Rational b = e < 0 ? Rational(1 / q) : q;
  for (int i = 0; i < (e < 0 ? -e : e); ++i) r *= b;
  return r;
}

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace anomalylab
