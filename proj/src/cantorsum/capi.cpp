#include "cantorsum/cantorsum.h"

#include "cantorsum/io.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

using namespace cantorsum;

struct cs_sum_system {
  SumSystem sum;
  Json input;  // normalized description, echoed into every report
};

namespace {

thread_local std::string last_error;

cs_status status_of(ErrorCode code) {
  return static_cast<cs_status>(CS_ERR_EMPTY_SYSTEM + static_cast<int>(code));
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

struct ArgumentError {
  std::string message;
};

template <class F>
cs_status guarded(F&& body) {
  last_error.clear();
  try {
    return body();
  } catch (const Error& e) {
    last_error = std::string(error_code_name(e.code())) + ": " + e.what();
    return status_of(e.code());
  } catch (const ArgumentError& e) {
    last_error = "InvalidArgument: " + e.message;
    return CS_ERR_INVALID_ARGUMENT;
  } catch (const Json::exception& e) {
    last_error = std::string("InvalidArgument: ") + e.what();
    return CS_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    last_error = std::string("Internal: ") + e.what();
    return CS_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (!p) throw ArgumentError{std::string(name) + " must not be null"};
}

Json parse_options(const char* text) {
  if (!text || !*text) return Json::object();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ArgumentError{std::string("options are not valid JSON: ") + e.what()};
  }
  if (!j.is_object()) throw ArgumentError{"options must be a JSON object"};
  return j;
}

double number_option(const Json& o, const char* key, double fallback) {
  if (!o.contains(key)) return fallback;
  if (!o.at(key).is_number()) throw ArgumentError{std::string("option \"") + key + "\" must be a number"};
  return o.at(key).get<double>();
}

long long integer_option(const Json& o, const char* key, long long fallback) {
  if (!o.contains(key)) return fallback;
  if (!o.at(key).is_number_integer()) throw ArgumentError{std::string("option \"") + key + "\" must be an integer"};
  return o.at(key).get<long long>();
}

std::vector<double> number_list(const Json& o, const char* key) {
  std::vector<double> out;
  if (!o.contains(key)) return out;
  const Json& v = o.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ArgumentError{std::string("option \"") + key + "\" must be a number or an array"};
  for (const auto& x : v) {
    if (!x.is_number()) throw ArgumentError{std::string("option \"") + key + "\" must hold numbers"};
    out.push_back(x.get<double>());
  }
  return out;
}

SearchOptions search_options(const Json& o) {
  SearchOptions opt;
  opt.scale_floor = number_option(o, "scale_floor", opt.scale_floor);
  long long threads = integer_option(o, "threads", 1);
  long long words = integer_option(o, "max_words", static_cast<long long>(opt.budget.max_words));
  long long squares = integer_option(o, "max_squares", static_cast<long long>(opt.budget.max_squares));
  if (threads < 1 || threads > 1024) throw ArgumentError{"threads must lie in [1, 1024]"};
  if (words < 1 || squares < 1) throw ArgumentError{"budgets must be positive"};
  opt.budget.threads = static_cast<unsigned>(threads);
  opt.budget.max_words = static_cast<std::size_t>(words);
  opt.budget.max_squares = static_cast<std::size_t>(squares);
  return opt;
}

Json config_of(const cs_sum_system* system, const Json& options) {
  Json c = options;
  if (system) c["system"] = system->input;
  return c;
}

Json normalized_input(const SumSystem& sum) {
  auto maps = [](const AffineCantorSystem& s) {
    Json a = Json::array();
    for (const auto& m : s.maps()) a.push_back({{"o", to_int(m.orientation)}, {"r", m.ratio.str()}, {"b", m.offset.str()}});
    return Json{{"maps", a}};
  };
  return {{"lambda_system", maps(sum.lambda_system())}, {"gamma_system", maps(sum.gamma_system())}, {"eta", sum.eta().str()}};
}

cs_status make_system(SumSystem sum, cs_sum_system** out) {
  Json input = normalized_input(sum);
  *out = new cs_sum_system{std::move(sum), std::move(input)};
  return CS_OK;
}

}  // namespace

extern "C" {

const char* cs_version(void) { return "1.0.0"; }

const char* cs_status_name(cs_status status) {
  switch (status) {
    case CS_OK: return "OK";
    case CS_NOT_FOUND: return "NotFound";
    case CS_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case CS_ERR_INTERNAL: return "Internal";
    default: break;
  }
  int code = static_cast<int>(status) - CS_ERR_EMPTY_SYSTEM;
  if (code >= 0 && code <= static_cast<int>(ErrorCode::parse_error)) return error_code_name(static_cast<ErrorCode>(code));
  return "Unknown";
}

const char* cs_last_error(void) { return last_error.c_str(); }

void cs_string_free(char* s) { std::free(s); }

cs_status cs_sum_system_from_json(const char* json_text, cs_sum_system** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    return make_system(parse_sum_system(json_text), out);
  });
}

cs_status cs_sum_system_from_file(const char* path, cs_sum_system** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    return make_system(load_sum_system(path), out);
  });
}

void cs_sum_system_free(cs_sum_system* system) { delete system; }

cs_status cs_analyze(const cs_sum_system* system, char** report_json) {
  return guarded([&] {
    require(system, "system");
    require(report_json, "report_json");
    Json report = sum_summary(system->sum);
    report["config"] = config_of(system, Json::object());
    *report_json = dup(report.dump(2));
    return CS_OK;
  });
}

cs_status cs_certify_zero(const cs_sum_system* system, const char* options_json, char** report_json) {
  return guarded([&] {
    require(system, "system");
    require(report_json, "report_json");
    Json options = parse_options(options_json);
    std::vector<double> eps_list = number_list(options, "eps");
    if (eps_list.empty()) throw ArgumentError{"option \"eps\" is required"};
    for (double e : eps_list)
      if (!(e > 0)) throw ArgumentError{"every eps must be positive"};
    SearchOptions opt = search_options(options);
    std::string method = options.value("method", std::string("auto"));
    if (method != "auto" && method != "search") throw ArgumentError{"method must be \"auto\" or \"search\""};

    Json results = Json::array();
    bool any_missing = false, any_budget = false;
    for (double e : eps_list) {
      Json r = {{"eps", e}};
      try {
        SearchOutcome out = method == "auto" ? certify_zero(system->sum, e, opt) : find_witness(system->sum, e, opt);
        r["status"] = out.witness ? "witness" : "not_found";
        r["depth_reached"] = out.depth_reached;
        r["squares_examined"] = out.squares_examined;
        if (out.witness)
          r["witness"] = witness_to_json(system->sum, *out.witness);
        else
          any_missing = true;
      } catch (const Error& err) {
        if (err.code() != ErrorCode::budget_exceeded) throw;
        r["status"] = "budget_exceeded";
        r["message"] = err.what();
        any_budget = true;
      }
      results.push_back(std::move(r));
    }
    Json report = {{"config", config_of(system, options)}, {"results", results}};
    *report_json = dup(report.dump(2));
    if (any_budget) {
      last_error = "BudgetExceeded: enumeration stopped before the scale floor";
      return CS_ERR_BUDGET_EXCEEDED;
    }
    return any_missing ? CS_NOT_FOUND : CS_OK;
  });
}

cs_status cs_verify_witness(const cs_sum_system* system, const char* witness_json, int* all_verified,
                            char** report_json) {
  return guarded([&] {
    require(system, "system");
    require(witness_json, "witness_json");
    require(all_verified, "all_verified");
    Json input;
    try {
      input = Json::parse(witness_json);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::parse_error, std::string("malformed witness JSON: ") + e.what());
    }
    std::vector<Json> witnesses;
    if (input.is_object() && input.contains("results")) {
      for (const auto& r : input.at("results"))
        if (r.contains("witness")) witnesses.push_back(r.at("witness"));
    } else if (input.is_object() && input.contains("witness")) {
      witnesses.push_back(input.at("witness"));
    } else {
      witnesses.push_back(input);
    }
    if (witnesses.empty()) throw Error(ErrorCode::parse_error, "no witness objects in the input");

    Json checked = Json::array();
    bool all = true;
    for (const auto& w : witnesses) {
      WitnessPair pair = witness_from_json(system->sum, w);
      bool ok = verify_witness(system->sum, pair);
      all = all && ok;
      checked.push_back(witness_to_json(system->sum, pair));
    }
    *all_verified = all ? 1 : 0;
    if (report_json) {
      Json report = {{"config", config_of(system, Json::object())}, {"all_verified", all}, {"witnesses", checked}};
      *report_json = dup(report.dump(2));
    }
    return CS_OK;
  });
}

cs_status cs_scan_projections(const cs_sum_system* system, const char* options_json, char** csv) {
  return guarded([&] {
    require(system, "system");
    require(csv, "csv");
    Json options = parse_options(options_json);
    double lo = number_option(options, "eta_lo", 0.5);
    double hi = number_option(options, "eta_hi", 2.0);
    long long grid = integer_option(options, "grid", 100);
    double eps = number_option(options, "eps", 0.05);
    if (grid < 2 || grid > 10'000'000) throw ArgumentError{"grid must lie in [2, 1e7]"};
    auto records = scan_projections(system->sum, lo, hi, static_cast<int>(grid), eps, search_options(options));
    *csv = dup(atlas_csv(records, config_of(system, options)));
    return CS_OK;
  });
}

cs_status cs_classify_middle(double lam, double gam, double boundary_tol, char** report_json) {
  return guarded([&] {
    require(report_json, "report_json");
    RegionLabel r = middle_set_classify(lam, gam, boundary_tol);
    auto margin = [](double m) { return std::isnan(m) ? Json(nullptr) : Json(m); };
    Json report = {{"lambda", lam},
                   {"gamma", gam},
                   {"boundary_tol", boundary_tol},
                   {"label", region_name(r.label)},
                   {"nearest", region_name(r.nearest)},
                   {"margins",
                    {{"thickness_product", margin(r.margins[0])},
                     {"dimension_sum_minus_one", margin(r.margins[1])},
                     {"difference_thickness_product", margin(r.margins[2])},
                     {"dimension_sum_minus_half", margin(r.margins[3])}}}};
    *report_json = dup(report.dump(2));
    return CS_OK;
  });
}

cs_status cs_region_map(int grid, double boundary_tol, char** csv, char** svg) {
  return guarded([&] {
    if (grid < 1 || grid > 5000) throw ArgumentError{"grid must lie in [1, 5000]"};
    auto cells = region_map(grid, boundary_tol);
    if (csv) *csv = dup(region_csv(cells, Json{{"grid", grid}, {"boundary_tol", boundary_tol}}));
    if (svg) *svg = dup(region_svg(cells, grid));
    return CS_OK;
  });
}

cs_status cs_covering_sums(const cs_sum_system* system, const char* options_json, char** csv) {
  return guarded([&] {
    require(system, "system");
    require(csv, "csv");
    Json options = parse_options(options_json);
    std::vector<double> radii = number_list(options, "radii");
    if (radii.empty()) throw ArgumentError{"option \"radii\" is required"};
    std::string mode = options.value("mode", std::string("merged"));
    if (mode != "merged" && mode != "raw") throw ArgumentError{"mode must be \"merged\" or \"raw\""};
    std::vector<std::pair<double, double>> rows;
    for (double r : radii)
      rows.emplace_back(r, covering_sum(system->sum, r, mode == "raw" ? CoveringMode::raw : CoveringMode::merged));
    *csv = dup(covering_csv(rows, config_of(system, options)));
    return CS_OK;
  });
}

cs_status cs_density(const cs_sum_system* system, const char* options_json, char** csv) {
  return guarded([&] {
    require(system, "system");
    require(csv, "csv");
    Json options = parse_options(options_json);
    std::vector<double> radii = number_list(options, "radii");
    if (radii.empty()) throw ArgumentError{"option \"radii\" is required"};
    const auto& s = system->sum;
    double left = s.lambda_system().hull().lo + s.eta_f() * s.gamma_system().hull().lo;
    double a = number_option(options, "a", left);
    std::vector<std::array<double, 3>> rows;
    for (double r : radii) rows.push_back({a, r, density_estimate(s, a, r)});
    *csv = dup(density_csv(rows, config_of(system, options)));
    return CS_OK;
  });
}

}  // extern "C"
