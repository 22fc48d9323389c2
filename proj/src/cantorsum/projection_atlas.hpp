#pragma once

// Projections of C_lambda x C_gamma in direction (1, eta), and the parameter
// regions of middle-interval Cantor sets.

#include "cantorsum/square_search.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cantorsum {

SumSystem scale_gamma(const SumSystem& sum, const Rational& eta);
SumSystem scale_gamma(const SumSystem& sum, double eta);

struct AtlasRecord {
  int index = 0;
  double eta = 0.0;
  double theta = 0.0;  // atan(eta)
  double eps = 0.0;
  bool witness_found = false;
  bool budget_exceeded = false;
  std::optional<WitnessPair> witness;
  int depth_reached = 0;
};

/// One record per point of the uniform eta grid eta_lo .. eta_hi (both included).
/// options.budget.threads workers share the grid; each search runs single-threaded.
std::vector<AtlasRecord> scan_projections(const SumSystem& sum, double eta_lo, double eta_hi, int grid_n,
                                          double eps, const SearchOptions& options);

double thickness(double lam);
double difference_thickness(double lam);

enum class Region { III, II, Ia, Ib, Ic, boundary };

const char* region_name(Region r);

struct RegionLabel {
  Region label = Region::boundary;
  Region nearest = Region::boundary;  // rule outcome ignoring the boundary tolerance
  /// thickness product - 1, d sum - 1, difference-thickness product - 1 (NaN when
  /// either ratio is >= 1/3), d sum - 1/2.
  std::array<double, 4> margins{};
};

RegionLabel middle_set_classify(double lam, double gam, double boundary_tol = 1e-9);

/// Two maps x -> lam x and x -> lam x + 1 - lam.
AffineCantorSystem middle_set_system(const Rational& lam);

struct RegionCell {
  double lam;
  double gam;
  Region label;
};

/// Cell centres of a grid_n x grid_n grid over (0, 1/2)^2.
std::vector<RegionCell> region_map(int grid_n, double boundary_tol = 1e-9);

/// Coloured regions plus the four separating curves, axes labelled lambda and gamma.
std::string region_svg(const std::vector<RegionCell>& cells, int grid_n);

}  // namespace cantorsum
