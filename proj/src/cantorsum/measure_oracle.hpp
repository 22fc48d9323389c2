#pragma once

// The natural product measure on cylinders and the covering and density
// diagnostics built on the r-square decomposition.

#include "cantorsum/square_search.hpp"

#include <vector>

namespace cantorsum {

/// lambda_u^{d_lambda} * gamma_v^{d_gamma}.
double cylinder_measure(const SumSystem& sum, const Word& u, const Word& v);

/// Rational map weights summing to exactly 1. For a homogeneous system these are
/// exactly 1/A; otherwise ratio^d rounded to 2^-60 with the last weight absorbing
/// the rounding.
std::vector<Rational> rational_weights(const AffineCantorSystem& system);

/// Product of rational_weights along u and v.
Rational exact_cylinder_mass(const SumSystem& sum, const Word& u, const Word& v);

/// Shortest words w with ratio_w < r, in lexicographic order.
std::vector<Word> side_partition(const AffineCantorSystem& system, double r);

/// Products of the two side partitions, ordered by (u, v).
std::vector<CylinderSquare> r_square_decomposition(const SumSystem& sum, double r);

/// F_u(hull_lambda) + eta G_v(hull_gamma).
Interval sum_image(const SumSystem& sum, const Word& u, const Word& v);

/// Mass of decomposition squares whose image meets [a - r, a + r], over r^{d_lambda + d_gamma}.
double density_estimate(const SumSystem& sum, double a, double r);

/// Number of decomposition squares at scale r whose image meets [a - r, a + r].
std::size_t count_y_r(const SumSystem& sum, double a, double r);

enum class CoveringMode {
  merged,  // components of the union of the images
  raw,     // one term per decomposition square
};

/// Sum of |I|^{d_lambda + d_gamma} over the images of the r-decomposition.
double covering_sum(const SumSystem& sum, double r, CoveringMode mode = CoveringMode::merged);

enum class PigeonholeReading {
  log_scaled, // M = floor(|log eta| / |log eps|) + 1
  corrected,  // M = floor(|log eta| / eps) + 1
};

struct PigeonholeBound {
  long long m = 0;
  double bound = 0.0;  // (M+1)^2 * 20 / (eta * eps)
};

PigeonholeBound pigeonhole_bound(double eps, double eta_const, PigeonholeReading reading);

}  // namespace cantorsum
