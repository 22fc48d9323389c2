#include "cantorsum/cantorsum.h"

#include <doctest.h>
#include <json.hpp>

#include <string>

namespace {

using Json = nlohmann::json;

const char* kMiddleThird = R"({
  "lambda_system": {"maps": [{"o": 1, "r": "1/3", "b": "0"}, {"o": 1, "r": "1/3", "b": "2/3"}]},
  "gamma_system": {"maps": [{"o": 1, "r": "1/3", "b": "0"}, {"o": 1, "r": "1/3", "b": "2/3"}]}
})";

struct Text {
  char* p = nullptr;
  ~Text() { cs_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct Handle {
  cs_sum_system* p = nullptr;
  ~Handle() { cs_sum_system_free(p); }
};

}  // namespace

TEST_CASE("C API: load, analyze, certify and verify") {
  Handle h;
  REQUIRE(cs_sum_system_from_json(kMiddleThird, &h.p) == CS_OK);
  Text analysis;
  REQUIRE(cs_analyze(h.p, &analysis.p) == CS_OK);
  auto a = Json::parse(analysis.str());
  CHECK(a["r_min"].get<double>() == doctest::Approx(1.0 / 3));
  CHECK(a["big_d"] == "1");

  Text report;
  REQUIRE(cs_certify_zero(h.p, R"({"eps": [0.5, 0.1, 0.02], "scale_floor": 1e-6})", &report.p) == CS_OK);
  auto r = Json::parse(report.str());
  REQUIRE(r["results"].size() == 3);
  for (const auto& res : r["results"]) {
    CHECK(res["status"] == "witness");
    CHECK(res["witness"]["verified_exact"] == true);
  }
  CHECK(r["config"].contains("system"));

  int all = 0;
  Text verdict;
  REQUIRE(cs_verify_witness(h.p, report.str().c_str(), &all, &verdict.p) == CS_OK);
  CHECK(all == 1);

  // A single witness object, then a tampered one.
  auto w = r["results"][0]["witness"];
  REQUIRE(cs_verify_witness(h.p, w.dump().c_str(), &all, nullptr) == CS_OK);
  CHECK(all == 1);
  w["square2"]["u"] = Json::array({2, 2});
  REQUIRE(cs_verify_witness(h.p, w.dump().c_str(), &all, nullptr) == CS_OK);
  CHECK(all == 0);
}

TEST_CASE("C API: NotFound and budget statuses") {
  Handle h;
  const char* ic = R"({
    "lambda_system": {"maps": [{"o": 1, "r": "1/20", "b": "0"}, {"o": 1, "r": "1/20", "b": "19/20"}]},
    "gamma_system": {"maps": [{"o": 1, "r": "1/20", "b": "0"}, {"o": 1, "r": "1/20", "b": "19/20"}]},
    "eta": "1.37"})";
  REQUIRE(cs_sum_system_from_json(ic, &h.p) == CS_OK);
  Text report;
  CHECK(cs_certify_zero(h.p, R"({"eps": 0.02, "scale_floor": 1.5625e-8})", &report.p) == CS_NOT_FOUND);
  auto r = Json::parse(report.str());
  CHECK(r["results"][0]["status"] == "not_found");
  CHECK(r["results"][0]["depth_reached"] == 6);

  Text cut;
  CHECK(cs_certify_zero(h.p, R"({"eps": 0.02, "scale_floor": 1e-14, "max_words": 100})", &cut.p) ==
        CS_ERR_BUDGET_EXCEEDED);
  CHECK(Json::parse(cut.str())["results"][0]["status"] == "budget_exceeded");
}

TEST_CASE("C API: errors carry codes and messages") {
  cs_sum_system* h = nullptr;
  const char* bad = R"({"lambda_system": {"maps": [{"o": 1, "r": "1.2", "b": "0"}]},
                        "gamma_system": {"maps": [{"o": 1, "r": "1/3", "b": "0"}]}})";
  CHECK(cs_sum_system_from_json(bad, &h) == CS_ERR_PARSE);
  CHECK(h == nullptr);
  CHECK(std::string(cs_last_error()).find("lambda_system.maps[0].r") != std::string::npos);
  CHECK(cs_sum_system_from_json("{not json", &h) == CS_ERR_PARSE);
  CHECK(cs_sum_system_from_json(nullptr, &h) == CS_ERR_INVALID_ARGUMENT);
  CHECK(cs_sum_system_from_file("/nonexistent/file.json", &h) == CS_ERR_PARSE);
  CHECK(std::string(cs_status_name(CS_ERR_BUDGET_EXCEEDED)) == "BudgetExceeded");

  Handle g;
  REQUIRE(cs_sum_system_from_json(kMiddleThird, &g.p) == CS_OK);
  Text out;
  CHECK(cs_certify_zero(g.p, R"({"eps": -1})", &out.p) == CS_ERR_INVALID_ARGUMENT);
  CHECK(cs_certify_zero(g.p, R"({"eps": 0.1, "threads": 0})", &out.p) == CS_ERR_INVALID_ARGUMENT);
  CHECK(cs_classify_middle(0.6, 0.2, 1e-9, &out.p) == CS_ERR_DOMAIN);
}

TEST_CASE("C API: classification, region map and diagnostics") {
  Text c;
  REQUIRE(cs_classify_middle(0.35, 0.35, 1e-9, &c.p) == CS_OK);
  CHECK(Json::parse(c.str())["label"] == "III");

  Text csv, svg;
  REQUIRE(cs_region_map(20, 1e-9, &csv.p, &svg.p) == CS_OK);
  CHECK(csv.str().rfind("# config: ", 0) == 0);
  CHECK(csv.str().find("lam,gam,label\n") != std::string::npos);
  CHECK(svg.str().find("curve-dimension-half") != std::string::npos);

  Handle h;
  REQUIRE(cs_sum_system_from_json(kMiddleThird, &h.p) == CS_OK);
  Text cov, den, scan;
  REQUIRE(cs_covering_sums(h.p, R"({"radii": [0.1, 0.01]})", &cov.p) == CS_OK);
  CHECK(cov.str().find("r,value\n") != std::string::npos);
  REQUIRE(cs_density(h.p, R"({"radii": [0.1]})", &den.p) == CS_OK);
  CHECK(den.str().find("a,r,estimate\n") != std::string::npos);
  REQUIRE(cs_scan_projections(h.p, R"({"eta_lo": 0.5, "eta_hi": 1.5, "grid": 3, "eps": 0.1})", &scan.p) == CS_OK);
  CHECK(scan.str().find("index,eta,theta,eps,witness_found,depth_reached\n") != std::string::npos);
  CHECK(scan.str().find("\n1,1,") != std::string::npos);
}
