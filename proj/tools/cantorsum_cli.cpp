// cantorsum command-line front end. Everything goes through the C API.

#include "cantorsum/cantorsum.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

enum Exit { kOk = 0, kError = 1, kNotFound = 2, kBudget = 3 };

struct Owned {
  char* p = nullptr;
  ~Owned() { cs_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct SystemHandle {
  cs_sum_system* p = nullptr;
  ~SystemHandle() { cs_sum_system_free(p); }
};

int report_failure(cs_status st) {
  std::cerr << "error: " << cs_last_error() << "\n";
  return st == CS_ERR_BUDGET_EXCEEDED ? kBudget : kError;
}

bool emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
  return true;
}

bool load(const std::string& path, SystemHandle& sys) {
  cs_status st = cs_sum_system_from_file(path.c_str(), &sys.p);
  if (st != CS_OK) {
    report_failure(st);
    return false;
  }
  return true;
}

struct SearchFlags {
  double scale_floor = 1e-6;
  unsigned threads = 1;
  long long max_words = 4'000'000;
  long long max_squares = 40'000'000;

  void add(CLI::App* app) {
    app->add_option("--scale-floor", scale_floor, "smallest side ratio enumerated")
        ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
    app->add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::Range(1u, 1024u));
    app->add_option("--max-words", max_words, "per-side word budget")->check(CLI::PositiveNumber);
    app->add_option("--max-squares", max_squares, "square budget")->check(CLI::PositiveNumber);
  }
  void into(Json& o) const {
    o["scale_floor"] = scale_floor;
    o["threads"] = threads;
    o["max_words"] = max_words;
    o["max_squares"] = max_squares;
  }
};

/// Radii from an explicit list or from base^-k for k in [k_min, k_max].
struct RadiusFlags {
  std::vector<double> radii;
  double base = 0;
  int k_min = 1;
  int k_max = 0;

  void add(CLI::App* app) {
    app->add_option("--radii", radii, "comma-separated radii")->delimiter(',');
    app->add_option("--base", base, "radii base^-k")->check(CLI::Range(1.0 + 1e-12, 1e12));
    app->add_option("--k-min", k_min, "first exponent")->check(CLI::Range(0, 200));
    app->add_option("--k-max", k_max, "last exponent")->check(CLI::Range(0, 200));
  }
  bool resolve(std::vector<double>& out) const {
    out = radii;
    if (base > 0 && k_max >= k_min)
      for (int k = k_min; k <= k_max; ++k) out.push_back(std::pow(base, -k));
    if (out.empty()) {
      std::cerr << "error: give --radii or --base with --k-max\n";
      return false;
    }
    return true;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Witness search for zero Hausdorff measure of sums of affine Cantor sets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cs_version()));

  // analyze
  std::string input, out_path;
  auto* analyze = app.add_subcommand("analyze", "dimensions, hulls and derived constants of a system file");
  analyze->add_option("input", input, "IFS description (JSON)")->required();
  analyze->add_option("--out", out_path, "output file (default stdout)");

  // certify-zero
  std::vector<double> eps_list;
  std::string method = "auto";
  SearchFlags certify_flags;
  auto* certify = app.add_subcommand("certify-zero", "search for eps-relatively close eps-squares at each eps");
  certify->add_option("input", input, "IFS description (JSON)")->required();
  certify->add_option("--eps", eps_list, "comma-separated eps values")->required()->delimiter(',')->check(CLI::PositiveNumber);
  certify->add_option("--method", method, "auto (closed-form corners when applicable) or search")
      ->check(CLI::IsMember({"auto", "search"}));
  certify->add_option("--out", out_path, "witness report file (default stdout)");
  certify_flags.add(certify);

  // verify-witness
  std::string witness_path;
  auto* verify = app.add_subcommand("verify-witness", "re-verify a witness or certify report exactly");
  verify->add_option("input", input, "IFS description (JSON)")->required();
  verify->add_option("--witness", witness_path, "witness JSON or certify-zero report")->required()->check(CLI::ExistingFile);
  verify->add_option("--out", out_path, "verification report (default stdout)");

  // scan-projections
  double eta_lo = 0.5, eta_hi = 2.0, scan_eps = 0.05;
  int grid = 100;
  SearchFlags scan_flags;
  scan_flags.scale_floor = 1e-4;
  auto* scan = app.add_subcommand("scan-projections", "witness search along a uniform grid of eta = tan(theta)");
  scan->add_option("input", input, "IFS description (JSON)")->required();
  scan->add_option("--eta-lo", eta_lo, "first eta")->check(CLI::PositiveNumber);
  scan->add_option("--eta-hi", eta_hi, "last eta")->check(CLI::PositiveNumber);
  scan->add_option("--grid", grid, "number of grid points")->check(CLI::Range(2, 10'000'000));
  scan->add_option("--eps", scan_eps, "eps")->check(CLI::PositiveNumber);
  scan->add_option("--csv", out_path, "atlas CSV (default stdout)");
  scan_flags.add(scan);

  // classify-middle
  double lam = 0, gam = 0, tol = 1e-9;
  bool as_json = false;
  auto* classify = app.add_subcommand("classify-middle", "region label of a pair of middle-interval Cantor sets");
  classify->add_option("--lambda", lam, "ratio of the first set")->required()->check(CLI::Range(0.0, 0.5));
  classify->add_option("--gamma", gam, "ratio of the second set")->required()->check(CLI::Range(0.0, 0.5));
  classify->add_option("--tol", tol, "boundary tolerance")->check(CLI::NonNegativeNumber);
  classify->add_flag("--json", as_json, "print margins as JSON");

  // region-map
  int region_grid = 200;
  std::string csv_path, svg_path;
  auto* region = app.add_subcommand("region-map", "region labels over (0,1/2)^2 as CSV and SVG");
  region->add_option("--grid", region_grid, "cells per axis")->check(CLI::Range(1, 5000));
  region->add_option("--tol", tol, "boundary tolerance")->check(CLI::NonNegativeNumber);
  region->add_option("--csv", csv_path, "region CSV (default stdout)");
  region->add_option("--svg", svg_path, "SVG rendering");

  // box-count
  RadiusFlags box_radii;
  std::string mode = "merged";
  auto* box = app.add_subcommand("box-count", "covering sums over the r-square decomposition");
  box->add_option("input", input, "IFS description (JSON)")->required();
  box->add_option("--mode", mode, "merged (union components) or raw (one term per square)")
      ->check(CLI::IsMember({"merged", "raw"}));
  box->add_option("--csv", out_path, "covering-sum CSV (default stdout)");
  box_radii.add(box);

  // density
  RadiusFlags density_radii;
  double centre = 0;
  auto* density = app.add_subcommand("density", "mass of B(a,r) over r^(d_lambda+d_gamma)");
  density->add_option("input", input, "IFS description (JSON)")->required();
  auto* centre_opt = density->add_option("--a", centre, "ball centre (default: left end of the sum's hull)");
  density->add_option("--csv", out_path, "density CSV (default stdout)");
  density_radii.add(density);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  if (analyze->parsed()) {
    SystemHandle sys;
    if (!load(input, sys)) return kError;
    Owned report;
    if (cs_status st = cs_analyze(sys.p, &report.p); st != CS_OK) return report_failure(st);
    return emit(report.str(), out_path) ? kOk : kError;
  }

  if (certify->parsed()) {
    SystemHandle sys;
    if (!load(input, sys)) return kError;
    Json o;
    o["command"] = "certify-zero";
    o["input"] = input;
    o["eps"] = eps_list;
    o["method"] = method;
    certify_flags.into(o);
    Owned report;
    cs_status st = cs_certify_zero(sys.p, o.dump().c_str(), &report.p);
    if (report.p && !emit(report.str(), out_path)) return kError;
    if (st == CS_OK) return kOk;
    if (st == CS_NOT_FOUND) {
      std::cerr << "no witness above the scale floor for at least one eps (evidence only)\n";
      return kNotFound;
    }
    return report_failure(st);
  }

  if (verify->parsed()) {
    SystemHandle sys;
    if (!load(input, sys)) return kError;
    std::ifstream in(witness_path, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    int all = 0;
    Owned report;
    if (cs_status st = cs_verify_witness(sys.p, text.c_str(), &all, &report.p); st != CS_OK) return report_failure(st);
    if (!emit(report.str(), out_path)) return kError;
    if (!all) {
      std::cerr << "witness failed exact verification\n";
      return kError;
    }
    return kOk;
  }

  if (scan->parsed()) {
    SystemHandle sys;
    if (!load(input, sys)) return kError;
    Json o;
    o["command"] = "scan-projections";
    o["input"] = input;
    o["eta_lo"] = eta_lo;
    o["eta_hi"] = eta_hi;
    o["grid"] = grid;
    o["eps"] = scan_eps;
    scan_flags.into(o);
    Owned csv;
    if (cs_status st = cs_scan_projections(sys.p, o.dump().c_str(), &csv.p); st != CS_OK) return report_failure(st);
    return emit(csv.str(), out_path) ? kOk : kError;
  }

  if (classify->parsed()) {
    Owned report;
    if (cs_status st = cs_classify_middle(lam, gam, tol, &report.p); st != CS_OK) return report_failure(st);
    if (as_json) return emit(report.str(), "") ? kOk : kError;
    std::cout << Json::parse(report.str()).at("label").get<std::string>() << "\n";
    return kOk;
  }

  if (region->parsed()) {
    Owned csv, svg;
    if (cs_status st = cs_region_map(region_grid, tol, &csv.p, svg_path.empty() ? nullptr : &svg.p); st != CS_OK)
      return report_failure(st);
    if (!emit(csv.str(), csv_path)) return kError;
    if (!svg_path.empty() && !emit(svg.str(), svg_path)) return kError;
    return kOk;
  }

  if (box->parsed()) {
    SystemHandle sys;
    if (!load(input, sys)) return kError;
    std::vector<double> radii;
    if (!box_radii.resolve(radii)) return kError;
    Json o;
    o["command"] = "box-count";
    o["input"] = input;
    o["radii"] = radii;
    o["mode"] = mode;
    Owned csv;
    if (cs_status st = cs_covering_sums(sys.p, o.dump().c_str(), &csv.p); st != CS_OK) return report_failure(st);
    return emit(csv.str(), out_path) ? kOk : kError;
  }

  if (density->parsed()) {
    SystemHandle sys;
    if (!load(input, sys)) return kError;
    std::vector<double> radii;
    if (!density_radii.resolve(radii)) return kError;
    Json o;
    o["command"] = "density";
    o["input"] = input;
    o["radii"] = radii;
    if (centre_opt->count() > 0) o["a"] = centre;
    Owned csv;
    if (cs_status st = cs_density(sys.p, o.dump().c_str(), &csv.p); st != CS_OK) return report_failure(st);
    return emit(csv.str(), out_path) ? kOk : kError;
  }
  return kError;
}
