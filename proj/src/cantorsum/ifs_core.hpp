#pragma once

// Affine iterated function systems on the line, words over their maps, and
// the pair of systems whose arithmetic sum is being analysed.

#include "cantorsum/error.hpp"
#include "cantorsum/numeric.hpp"

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace cantorsum {

enum class Sign : int { minus = -1, plus = 1 };

inline Sign operator*(Sign a, Sign b) {
  return static_cast<int>(a) == static_cast<int>(b) ? Sign::plus : Sign::minus;
}
inline int to_int(Sign s) { return static_cast<int>(s); }
Sign sign_from_int(int o);

/// x -> orientation * ratio * x + offset.
struct ContractionMap {
  Sign orientation = Sign::plus;
  Rational ratio;
  Rational offset;
};

/// Validates 0 < ratio < 1 and o in {-1, +1}.
ContractionMap make_map(int orientation, const Rational& ratio, const Rational& offset);

/// Finite sequence of 1-based map indices. The empty word is the identity.
class Word {
 public:
  using Digit = std::uint32_t;

  Word() = default;
  explicit Word(std::vector<Digit> digits) : digits_(std::move(digits)) {}
  Word(std::initializer_list<Digit> digits) : digits_(digits) {}

  static Word repeat(Digit digit, std::size_t count) { return Word(std::vector<Digit>(count, digit)); }
  /// "21" or "12.3.1"; digits above 9 force the dotted form.
  static Word parse(std::string_view text);

  std::size_t size() const noexcept { return digits_.size(); }
  bool empty() const noexcept { return digits_.empty(); }
  Digit operator[](std::size_t i) const { return digits_[i]; }
  auto begin() const noexcept { return digits_.begin(); }
  auto end() const noexcept { return digits_.end(); }
  const std::vector<Digit>& digits() const noexcept { return digits_; }

  void push_back(Digit d) { digits_.push_back(d); }
  Word operator+(const Word& tail) const;

  std::string str() const;

  auto operator<=>(const Word&) const = default;
  bool operator==(const Word&) const = default;

 private:
  std::vector<Digit> digits_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

struct ExactInterval {
  Rational lo;
  Rational hi;
};

/// Products along a word plus the point of the attractor with address u 1̄.
struct WordStats {
  double ratio = 1.0;
  Sign orientation = Sign::plus;
  double endpoint = 0.0;
  double log_ratio = 0.0;
};

struct ExactWordStats {
  Rational ratio{1};
  Sign orientation = Sign::plus;
  Rational endpoint;
};

class AffineCantorSystem {
 public:
  const std::vector<ContractionMap>& maps() const noexcept { return maps_; }
  std::size_t size() const noexcept { return maps_.size(); }

  double dimension() const noexcept { return dimension_; }
  const ExactInterval& exact_hull() const noexcept { return hull_; }
  Interval hull() const noexcept { return {hull_lo_, hull_hi_}; }
  const Rational& diameter() const noexcept { return diameter_; }
  double diameter_f() const noexcept { return hull_hi_ - hull_lo_; }

  // 1-based digit accessors.
  double ratio(Word::Digit d) const { return ratio_f_[d - 1]; }
  double log_ratio(Word::Digit d) const { return log_ratio_[d - 1]; }
  double offset(Word::Digit d) const { return offset_f_[d - 1]; }
  Sign orientation(Word::Digit d) const { return maps_[d - 1].orientation; }

  double min_ratio() const noexcept;
  double max_ratio() const noexcept;
  bool homogeneous() const noexcept;
  bool orientation_preserving() const noexcept;

  /// Fixed point of map 1, the seed used for the address 1̄.
  double anchor() const noexcept { return anchor_f_; }
  const Rational& exact_anchor() const noexcept { return anchor_; }

  void check_word(const Word& w) const;

  double apply(Word::Digit d, double x) const {
    return (maps_[d - 1].orientation == Sign::plus ? ratio_f_[d - 1] : -ratio_f_[d - 1]) * x +
           offset_f_[d - 1];
  }

 private:
  friend AffineCantorSystem validate_system(std::vector<ContractionMap> maps, double dimension_tol,
                                            double hull_tol);
  AffineCantorSystem() = default;

  std::vector<ContractionMap> maps_;
  std::vector<double> ratio_f_, log_ratio_, offset_f_;
  double dimension_ = 0.0;
  ExactInterval hull_;
  double hull_lo_ = 0.0, hull_hi_ = 0.0;
  Rational diameter_;
  Rational anchor_;
  double anchor_f_ = 0.0;
};

/// Builds a system and its cached dimension, hull and diameter.
AffineCantorSystem validate_system(std::vector<ContractionMap> maps, double dimension_tol = 1e-12,
                                   double hull_tol = 1e-14);

/// Unique d >= 0 with sum_i r_i^d = 1 (bisection, then Newton polish).
double similarity_dimension(std::span<const double> ratios, double tol = 1e-12);

/// Smallest interval mapped into itself by every map. The endpoint selection
/// is found by iterating the interval map in binary64 and then solved and
/// checked exactly.
ExactInterval convex_hull(std::span<const ContractionMap> maps, double tol = 1e-14);

WordStats word_stats(const AffineCantorSystem& system, const Word& word);
ExactWordStats exact_word_stats(const AffineCantorSystem& system, const Word& word);

/// F_u(x) for a word u.
double apply_word(const AffineCantorSystem& system, const Word& word, double x);
Rational exact_apply_word(const AffineCantorSystem& system, const Word& word, const Rational& x);

/// F_u(hull).
Interval word_image(const AffineCantorSystem& system, const Word& word);

/// Two systems, with the gamma side scaled by eta in the sum C_lambda + eta C_gamma.
class SumSystem {
 public:
  SumSystem(AffineCantorSystem lambda_system, AffineCantorSystem gamma_system, Rational eta = Rational(1));

  const AffineCantorSystem& lambda_system() const noexcept { return lambda_; }
  const AffineCantorSystem& gamma_system() const noexcept { return gamma_; }

  const Rational& eta() const noexcept { return eta_; }
  double eta_f() const noexcept { return eta_f_; }
  bool scaled() const noexcept { return eta_ != 1; }

  /// Smallest contraction ratio over both systems.
  double r_min() const noexcept { return r_min_; }
  /// max{D_lambda, eta * D_gamma}.
  const Rational& big_d() const noexcept { return big_d_; }
  double big_d_f() const noexcept { return big_d_f_; }
  double sum_dimension() const noexcept { return lambda_.dimension() + gamma_.dimension(); }

  /// kappa = D_lambda / (eta D_gamma); square tests compare kappa*lambda_u with gamma_v.
  /// A zero diameter counts as 1.
  const Rational& size_factor() const noexcept { return kappa_; }
  double log_size_factor() const noexcept { return log_kappa_; }

  SumSystem with_eta(const Rational& eta) const { return SumSystem(lambda_, gamma_, eta); }

 private:
  AffineCantorSystem lambda_;
  AffineCantorSystem gamma_;
  Rational eta_;
  double eta_f_;
  double r_min_;
  Rational big_d_;
  double big_d_f_;
  Rational kappa_;
  double log_kappa_;
};

/// L_eta(u 1̄, v 1̄).
double sum_endpoint(const SumSystem& sum, const Word& u, const Word& v);
Rational exact_sum_endpoint(const SumSystem& sum, const Word& u, const Word& v);

}  // namespace cantorsum
