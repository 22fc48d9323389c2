#pragma once

// Squares u x v of the symbolic product, the relative-closeness predicate,
// and the search for two distinct close squares.

#include "cantorsum/ifs_core.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace cantorsum {

struct CylinderSquare {
  Word u;
  Word v;
  double lambda_u = 1.0;
  double gamma_v = 1.0;
  Sign o_lambda = Sign::plus;
  Sign o_gamma = Sign::plus;
  double endpoint = 0.0;  // L_eta(u 1̄, v 1̄)
  double log_lambda = 0.0;
  double log_gamma = 0.0;

  bool same_words(const CylinderSquare& other) const { return u == other.u && v == other.v; }
};

CylinderSquare make_square(const SumSystem& sum, Word u, Word v);

/// Word-lexicographic order on (u, v); the canonical order of witness pairs.
inline bool square_less(const CylinderSquare& a, const CylinderSquare& b) {
  return std::tie(a.u, a.v) < std::tie(b.u, b.v);
}

struct ClosenessVerdict {
  bool ratio_ok = false;
  bool orientation_ok = false;
  bool endpoint_ok = false;
  double margin = 0.0;

  bool close() const { return ratio_ok && orientation_ok && endpoint_ok; }
};

/// |log(kappa * lambda_u / gamma_v)| < delta, evaluated in binary64.
bool is_delta_square(const SumSystem& sum, const CylinderSquare& sq, double delta);
/// The same test decided with exact ratios and 100-digit exponentials.
bool is_delta_square_exact(const SumSystem& sum, const Word& u, const Word& v, const Real& delta);

ClosenessVerdict relative_closeness(const SumSystem& sum, const CylinderSquare& a, const CylinderSquare& b,
                                    double eps);
ClosenessVerdict exact_closeness(const SumSystem& sum, const CylinderSquare& a, const CylinderSquare& b,
                                 const Real& eps);

struct WitnessPair {
  CylinderSquare first;
  CylinderSquare second;
  Real epsilon;
  Real delta;  // both squares are delta-squares; equals epsilon for search results
  ClosenessVerdict verdict;
  bool verified_exact = false;
  int depth = 0;
  std::string method = "search";
};

/// Recomputes everything exactly: distinct words, both squares delta-squares,
/// closeness at epsilon. Updates verdict and verified_exact and returns the latter.
bool verify_witness(const SumSystem& sum, WitnessPair& pair);

/// Builds and verifies a pair from words.
WitnessPair make_pair(const SumSystem& sum, CylinderSquare a, CylinderSquare b, const Real& eps, const Real& delta);

struct SearchBudget {
  std::size_t max_words = 4'000'000;    // per side
  std::size_t max_squares = 40'000'000;  // total squares generated
  unsigned threads = 1;
};

struct SearchOptions {
  double scale_floor = 1e-4;
  SearchBudget budget;
  /// Keep only squares with O_u = O_v (needed when squares are reused as prefixes).
  bool balanced_orientation = false;
  /// Screening of squares uses this delta when set; otherwise delta = eps.
  std::optional<double> delta;
};

struct SearchOutcome {
  std::optional<WitnessPair> witness;
  int depth_reached = 0;  // last scale band fully processed
  std::size_t squares_examined = 0;
};

/// Scale-band enumeration of all eps-squares with both side ratios >= scale_floor.
/// Throws BudgetExceeded when the enumeration cannot be completed.
SearchOutcome find_witness(const SumSystem& sum, double eps, const SearchOptions& options);

/// Smallest n + m with |n log lambda - m log gamma| < log(1 + eps); ties go to the
/// smaller deviation, then the smaller n.
std::pair<int, int> homogeneous_corner_witness(double lambda, double gamma, double eps);

/// Corner squares i_R^n x j_L^m and i_L^n x j_R^m, when the systems admit them.
std::optional<WitnessPair> corner_witness(const SumSystem& sum, double eps);

/// Corner construction when applicable, otherwise the band search.
SearchOutcome certify_zero(const SumSystem& sum, double eps, const SearchOptions& options);

// ---------------------------------------------------------------------------
// Constructions on witness pairs.

/// s u_i x t v_i; epsilon becomes eps e^{d'} + 2|e^{d'}-1| e^{d'+d+eps} / lambda_{u_1}.
WitnessPair concat_left(const SumSystem& sum, const CylinderSquare& prefix, const WitnessPair& pair,
                        const Real& delta_prime);
/// u_i s x v_i t; epsilon becomes e^{d'} (eps + 2 e^{eps+d} |e^eps - 1|) / lambda_s.
WitnessPair concat_right(const SumSystem& sum, const WitnessPair& pair, const CylinderSquare& suffix,
                         const Real& delta_prime);

Real concat_left_bound(const Real& eps, const Real& delta, const Real& delta_prime, const Real& lambda_u1);
Real concat_right_bound(const Real& eps, const Real& delta, const Real& delta_prime, const Real& lambda_s);

/// Joins (A, B) and (B, C) into (A, C) at four times the larger epsilon.
WitnessPair transitivity_bound(const SumSystem& sum, const WitnessPair& p1, const WitnessPair& p2);

struct Padding {
  Word alpha;
  Word beta;
  int k_used = 0;
};

/// Words alpha, beta with O_{s alpha} = O_{t beta} and s alpha x t beta a delta-square.
Padding find_padding(const SumSystem& sum, const Word& s, const Word& t, double delta, double r,
                     int max_length = 64);

/// n_target distinct squares, pairwise eps-relatively close delta-squares.
std::vector<CylinderSquare> amplify(const SumSystem& sum, double eps, double delta, int n_target,
                                    const SearchOptions& options);

}  // namespace cantorsum
