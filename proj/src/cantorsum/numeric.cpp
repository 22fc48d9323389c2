#include "cantorsum/numeric.hpp"

#include "cantorsum/error.hpp"

#include <cctype>
#include <cstdio>

namespace cantorsum {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::empty_system: return "EmptySystem";
    case ErrorCode::ratio_out_of_range: return "RatioOutOfRange";
    case ErrorCode::orientation_out_of_range: return "OrientationOutOfRange";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::invalid_digit: return "InvalidDigit";
    case ErrorCode::orientation_mismatch: return "OrientationMismatch";
    case ErrorCode::no_shared_square: return "NoSharedSquare";
    case ErrorCode::epsilon_too_large: return "EpsilonTooLarge";
    case ErrorCode::search_exhausted: return "SearchExhausted";
    case ErrorCode::budget_exceeded: return "BudgetExceeded";
    case ErrorCode::witness_unavailable: return "WitnessUnavailable";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::nonpositive_eta: return "NonpositiveEta";
    case ErrorCode::degenerate_system: return "DegenerateSystem";
    case ErrorCode::parse_error: return "ParseError";
  }
  return "Unknown";
}

namespace {

[[noreturn]] void bad_number(std::string_view text) {
  throw Error(ErrorCode::parse_error, "not a number: \"" + std::string(text) + "\"");
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Integer pow10(unsigned n) {
  Integer r = 1;
  for (unsigned i = 0; i < n; ++i) r *= 10;
  return r;
}

Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = s.substr(e + 1);
    s = s.substr(0, e);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6) bad_number(text);
    exponent = std::stol(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
  }
  std::string_view int_part = s, frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) bad_number(text);
  if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)))
    bad_number(text);

  std::string digits = std::string(int_part) + std::string(frac_part);
  Integer mantissa(digits.empty() ? std::string("0") : digits);
  exponent -= static_cast<long>(frac_part.size());
  Rational value = exponent >= 0 ? Rational(mantissa * pow10(static_cast<unsigned>(exponent)))
                                 : Rational(mantissa, pow10(static_cast<unsigned>(-exponent)));
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) bad_number(text);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw Error(ErrorCode::parse_error, "zero denominator in \"" + std::string(text) + "\"");
    return num / den;
  }
  return parse_decimal(text);
}

bool certainly_less(const Real& a, const Real& b) {
  if (!(a < b)) return false;
  Real gap = b - a;
  Real scale = abs(a) + abs(b);
  return gap > scale * Real(kCertificateResolution);
}

std::string real_to_string_upward(const Real& x, int digits) {
  if (x == 0) return "0";
  std::string plain = x.str(digits, std::ios_base::fmtflags(0));
  if (Real(plain) >= x) return plain;
  Real bumped = x * (Real(1) + pow(Real(10), -(digits - 2)));
  return bumped.str(digits, std::ios_base::fmtflags(0));
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string rational_to_string(const Rational& q) { return q.str(); }

}  // namespace cantorsum
