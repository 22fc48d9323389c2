#include "cantorsum/projection_atlas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace cantorsum {

SumSystem scale_gamma(const SumSystem& sum, const Rational& eta) {
  if (eta <= 0) throw Error(ErrorCode::nonpositive_eta, "eta must be positive, got " + eta.str());
  return sum.with_eta(eta);
}

SumSystem scale_gamma(const SumSystem& sum, double eta) {
  if (!(eta > 0) || !std::isfinite(eta))
    throw Error(ErrorCode::nonpositive_eta, "eta must be positive, got " + format_double(eta));
  return sum.with_eta(to_rational(eta));
}

std::vector<AtlasRecord> scan_projections(const SumSystem& sum, double eta_lo, double eta_hi, int grid_n,
                                          double eps, const SearchOptions& options) {
  if (!(eta_lo > 0)) throw Error(ErrorCode::nonpositive_eta, "eta_lo must be positive");
  if (!(eta_hi > eta_lo)) throw Error(ErrorCode::domain_error, "eta_hi must exceed eta_lo");
  if (grid_n < 2) throw Error(ErrorCode::domain_error, "grid needs at least two points");

  std::vector<AtlasRecord> records(static_cast<std::size_t>(grid_n));
  SearchOptions inner = options;
  inner.budget.threads = 1;

  auto run = [&](std::size_t i) {
    AtlasRecord& rec = records[i];
    rec.index = static_cast<int>(i);
    rec.eta = i + 1 == records.size() ? eta_hi : eta_lo + (eta_hi - eta_lo) * static_cast<double>(i) / (grid_n - 1);
    rec.theta = std::atan(rec.eta);
    rec.eps = eps;
    SumSystem scaled = scale_gamma(sum, rec.eta);
    try {
      SearchOutcome out = certify_zero(scaled, eps, inner);
      rec.depth_reached = out.depth_reached;
      rec.witness_found = out.witness.has_value();
      rec.witness = std::move(out.witness);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::budget_exceeded) throw;
      rec.budget_exceeded = true;
      rec.depth_reached = -1;
    }
  };

  const unsigned threads = std::max(1u, options.budget.threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < records.size(); ++i) run(i);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < records.size();) {
        if (failed) return;
        try {
          run(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return records;
}

double thickness(double lam) {
  if (!(lam > 0 && lam < 0.5)) throw Error(ErrorCode::domain_error, "thickness needs 0 < lambda < 1/2");
  return lam / (1 - 2 * lam);
}

double difference_thickness(double lam) {
  if (!(lam > 0 && lam < 1.0 / 3)) throw Error(ErrorCode::domain_error, "difference thickness needs 0 < lambda < 1/3");
  return 2 * lam / (1 - 3 * lam);
}

const char* region_name(Region r) {
  switch (r) {
    case Region::III: return "III";
    case Region::II: return "II";
    case Region::Ia: return "Ia";
    case Region::Ib: return "Ib";
    case Region::Ic: return "Ic";
    case Region::boundary: return "boundary";
  }
  return "?";
}

namespace {

double middle_dimension(double lam) { return std::log(2.0) / std::log(1 / lam); }

}  // namespace

RegionLabel middle_set_classify(double lam, double gam, double boundary_tol) {
  if (!(lam > 0 && lam < 0.5 && gam > 0 && gam < 0.5))
    throw Error(ErrorCode::domain_error, "middle-set parameters must lie in (0, 1/2)");
  if (!(boundary_tol >= 0)) throw Error(ErrorCode::domain_error, "boundary tolerance must be nonnegative");
  RegionLabel out;
  const double dsum = middle_dimension(lam) + middle_dimension(gam);
  const bool below_pole = lam < 1.0 / 3 && gam < 1.0 / 3;
  out.margins = {thickness(lam) * thickness(gam) - 1, dsum - 1,
                 below_pole ? difference_thickness(lam) * difference_thickness(gam) - 1
                            : std::numeric_limits<double>::quiet_NaN(),
                 dsum - 0.5};

  // Rules in precedence order; every margin consulted on the way decides the label.
  std::vector<double> deciding{out.margins[0]};
  if (out.margins[0] > 0) {
    out.nearest = Region::III;
  } else {
    deciding.push_back(out.margins[1]);
    if (out.margins[1] > 0) {
      out.nearest = Region::II;
    } else {
      if (below_pole) deciding.push_back(out.margins[2]);
      if (below_pole && out.margins[2] > 0) {
        out.nearest = Region::Ia;
      } else {
        deciding.push_back(out.margins[3]);
        out.nearest = out.margins[3] < 0 ? Region::Ic : Region::Ib;
      }
    }
  }
  out.label = out.nearest;
  for (double m : deciding)
    if (std::fabs(m) <= boundary_tol) out.label = Region::boundary;
  return out;
}

AffineCantorSystem middle_set_system(const Rational& lam) {
  if (!(lam > 0 && lam < Rational(1, 2))) throw Error(ErrorCode::domain_error, "middle-set ratio must lie in (0, 1/2)");
  return validate_system({make_map(1, lam, 0), make_map(1, lam, 1 - lam)});
}

std::vector<RegionCell> region_map(int grid_n, double boundary_tol) {
  if (grid_n < 1) throw Error(ErrorCode::domain_error, "grid must have at least one cell");
  std::vector<RegionCell> cells;
  cells.reserve(static_cast<std::size_t>(grid_n) * grid_n);
  const double h = 0.5 / grid_n;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      double lam = (i + 0.5) * h, gam = (j + 0.5) * h;
      cells.push_back({lam, gam, middle_set_classify(lam, gam, boundary_tol).label});
    }
  return cells;
}

namespace {

const char* region_colour(Region r) {
  switch (r) {
    case Region::III: return "#d9ead3";
    case Region::II: return "#cfe2f3";
    case Region::Ia: return "#fff2cc";
    case Region::Ib: return "#f4cccc";
    case Region::Ic: return "#d9d2e9";
    case Region::boundary: return "#999999";
  }
  return "#ffffff";
}

struct Frame {
  double size = 500, margin = 60;
  double x(double lam) const { return margin + lam / 0.5 * size; }
  double y(double gam) const { return margin + size - gam / 0.5 * size; }
};

std::string polyline(const Frame& f, const char* id, const char* colour, double lam_lo, double lam_hi,
                     double (*curve)(double)) {
  std::ostringstream os;
  os << "<polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
  const int n = 400;
  for (int k = 0; k <= n; ++k) {
    double lam = lam_lo + (lam_hi - lam_lo) * k / n;
    double gam = curve(lam);
    if (!(gam > 0 && gam < 0.5)) continue;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", f.x(lam), f.y(gam));
    os << buf;
  }
  os << "\"/>\n";
  return os.str();
}

double thickness_curve(double lam) {
  double k = (1 - 2 * lam) / lam;
  return k / (1 + 2 * k);
}

double dimension_one_curve(double lam) { return std::pow(2.0, -1 / (1 - middle_dimension(lam))); }

double difference_curve(double lam) {
  double k = (1 - 3 * lam) / (2 * lam);
  return k / (2 + 3 * k);
}

double dimension_half_curve(double lam) { return std::pow(2.0, -1 / (0.5 - middle_dimension(lam))); }

}  // namespace

std::string region_svg(const std::vector<RegionCell>& cells, int grid_n) {
  Frame f;
  const double cell = f.size / grid_n;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.size + 2 * f.margin << "\" height=\""
     << f.size + 2 * f.margin << "\" font-family=\"sans-serif\" font-size=\"14\">\n";
  os << "<g id=\"regions\" shape-rendering=\"crispEdges\">\n";
  char buf[160];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                  f.x(c.lam) - cell / 2, f.y(c.gam) - cell / 2, cell, cell, region_colour(c.label));
    os << buf;
  }
  os << "</g>\n<g id=\"curves\">\n";
  const double tiny = 1e-4;
  os << polyline(f, "curve-thickness", "#38761d", tiny, 0.5 - tiny, thickness_curve);
  os << polyline(f, "curve-dimension-one", "#0b5394", tiny, 0.5 - tiny, dimension_one_curve);
  os << polyline(f, "curve-difference-thickness", "#bf9000", tiny, 1.0 / 3 - tiny, difference_curve);
  os << polyline(f, "curve-dimension-half", "#990000", tiny, 0.25 - tiny, dimension_half_curve);
  os << "</g>\n";
  os << "<rect x=\"" << f.margin << "\" y=\"" << f.margin << "\" width=\"" << f.size << "\" height=\"" << f.size
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">%.1f</text>\n", f.x(t),
                  f.y(0) + 20, t);
    os << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\">%.1f</text>\n", f.x(0) - 8,
                  f.y(t) + 5, t);
    os << buf;
  }
  os << "<text x=\"" << f.x(0.25) << "\" y=\"" << f.y(0) + 45 << "\" text-anchor=\"middle\">λ</text>\n";
  os << "<text x=\"" << f.x(0) - 40 << "\" y=\"" << f.y(0.25) << "\" text-anchor=\"middle\">γ</text>\n";
  const std::pair<Region, std::pair<double, double>> tags[] = {{Region::III, {0.42, 0.42}},
                                                              {Region::II, {0.3, 0.3}},
                                                              {Region::Ia, {0.24, 0.24}},
                                                              {Region::Ib, {0.1, 0.1}},
                                                              {Region::Ic, {0.03, 0.03}}};
  for (const auto& [r, pos] : tags) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">%s</text>\n",
                  f.x(pos.first), f.y(pos.second), region_name(r));
    os << buf;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace cantorsum
