#pragma once

// Number types shared by the engine.
//
// Map parameters are exact rationals. Search-phase screening runs in binary64;
// certificates are decided with exact rationals, and where a transcendental
// quantity is involved (logarithms, exponentials) with 100-digit MPFR floats
// under a conservative strictness rule (see certainly_less).

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <compare>
#include <string>
#include <string_view>

namespace cantorsum {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;
using Real = boost::multiprecision::mpfr_float_100;

/// Parses "p/q", an integer, or a decimal ("0.3", "-1.25e-2") into an exact rational.
Rational parse_rational(std::string_view text);

/// Exact value of a binary64 number.
inline Rational to_rational(double x) { return Rational(x); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const Real& x) { return x.convert_to<double>(); }
inline Real to_real(const Rational& q) { return Real(q); }

/// Relative resolution below which two 100-digit values are treated as
/// indistinguishable. Strict inequalities closer than this are reported false.
inline constexpr double kCertificateResolution = 1e-80;

/// a < b, decided only when the gap is resolvable at kCertificateResolution.
bool certainly_less(const Real& a, const Real& b);

/// Decimal text of x rounded away from zero in the last place, so that
/// parsing it back yields a value with magnitude >= |x|.
std::string real_to_string_upward(const Real& x, int digits = 40);

/// "%.17g" formatting used by every CSV/JSON report.
std::string format_double(double x);

std::string rational_to_string(const Rational& q);

/// Three-way sign of a rational.
inline int sign(const Rational& q) { return q.sign(); }

inline Rational abs_rational(const Rational& q) { return q.sign() < 0 ? Rational(-q) : q; }

}  // namespace cantorsum
