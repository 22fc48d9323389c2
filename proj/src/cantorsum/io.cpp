#include "cantorsum/io.hpp"

#include <fstream>
#include <sstream>

namespace cantorsum {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::parse_error, path + ": " + what);
}

Rational number_field(const Json& j, const std::string& path) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(Integer(j.dump()));
    if (j.is_number_float()) return parse_rational(j.dump());
  } catch (const Error& e) {
    fail(path, e.what());
  }
  fail(path, "expected a decimal or rational string");
}

AffineCantorSystem parse_system(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (!j.contains("maps")) fail(path, "missing key \"maps\"");
  const Json& maps = j.at("maps");
  if (!maps.is_array()) fail(path + ".maps", "expected an array");
  if (maps.empty()) fail(path + ".maps", "a system needs at least one map");
  std::vector<ContractionMap> out;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    std::string mp = path + ".maps[" + std::to_string(i) + "]";
    const Json& m = maps[i];
    if (!m.is_object()) fail(mp, "expected an object");
    for (const char* key : {"o", "r", "b"})
      if (!m.contains(key)) fail(mp, std::string("missing key \"") + key + "\"");
    int o = 0;
    const Json& oj = m.at("o");
    if (oj.is_number_integer())
      o = oj.get<int>();
    else if (oj.is_string() && (oj == "1" || oj == "+1" || oj == "-1"))
      o = std::stoi(oj.get<std::string>());
    else
      fail(mp + ".o", "orientation must be 1 or -1");
    if (o != 1 && o != -1) fail(mp + ".o", "orientation must be 1 or -1, got " + oj.dump());
    Rational r = number_field(m.at("r"), mp + ".r");
    Rational b = number_field(m.at("b"), mp + ".b");
    if (r <= 0 || r >= 1) fail(mp + ".r", "contraction ratio " + m.at("r").dump() + " is outside (0,1)");
    out.push_back(ContractionMap{sign_from_int(o), r, b});
  }
  try {
    return validate_system(std::move(out));
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

std::string csv_header(const Json& config) { return "# config: " + config.dump() + "\n"; }

Json digits_json(const Word& w) {
  Json a = Json::array();
  for (auto d : w) a.push_back(d);
  return a;
}

Word digits_from_json(const Json& j, const std::string& path) {
  if (j.is_string()) return Word::parse(j.get<std::string>());
  if (!j.is_array()) fail(path, "expected an array of digits");
  std::vector<Word::Digit> d;
  for (const auto& x : j) {
    if (!x.is_number_integer() || x.get<long long>() < 1) fail(path, "digits must be positive integers");
    d.push_back(x.get<Word::Digit>());
  }
  return Word(std::move(d));
}

Real real_field(const Json& j, const std::string& path) {
  try {
    if (j.is_string()) return Real(j.get<std::string>());
    if (j.is_number()) return Real(j.get<double>());
  } catch (const std::exception&) {
  }
  fail(path, "expected a number");
}

}  // namespace

SumSystem parse_sum_system(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail("<root>", "expected an object");
  for (const char* key : {"lambda_system", "gamma_system"})
    if (!j.contains(key)) fail("<root>", std::string("missing key \"") + key + "\"");
  AffineCantorSystem ls = parse_system(j.at("lambda_system"), "lambda_system");
  AffineCantorSystem gs = parse_system(j.at("gamma_system"), "gamma_system");
  Rational eta{1};
  if (j.contains("eta")) {
    eta = number_field(j.at("eta"), "eta");
    if (eta <= 0) fail("eta", "eta must be positive");
  }
  return SumSystem(std::move(ls), std::move(gs), eta);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SumSystem load_sum_system(const std::string& path) {
  try {
    return parse_sum_system(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

Json system_to_json(const AffineCantorSystem& system) {
  Json maps = Json::array();
  for (const auto& m : system.maps())
    maps.push_back({{"o", to_int(m.orientation)}, {"r", m.ratio.str()}, {"b", m.offset.str()}});
  return {{"maps", maps},
          {"dimension", system.dimension()},
          {"hull", {system.exact_hull().lo.str(), system.exact_hull().hi.str()}},
          {"diameter", system.diameter().str()},
          {"homogeneous", system.homogeneous()},
          {"orientation_preserving", system.orientation_preserving()}};
}

Json sum_summary(const SumSystem& sum) {
  return {{"lambda_system", system_to_json(sum.lambda_system())},
          {"gamma_system", system_to_json(sum.gamma_system())},
          {"eta", sum.eta().str()},
          {"r_min", sum.r_min()},
          {"big_d", sum.big_d().str()},
          {"sum_dimension", sum.sum_dimension()},
          {"size_factor", sum.size_factor().str()}};
}

Json square_to_json(const SumSystem& sum, const CylinderSquare& sq) {
  ExactWordStats a = exact_word_stats(sum.lambda_system(), sq.u);
  ExactWordStats b = exact_word_stats(sum.gamma_system(), sq.v);
  return {{"u", digits_json(sq.u)},
          {"v", digits_json(sq.v)},
          {"lambda_u", a.ratio.str()},
          {"gamma_v", b.ratio.str()},
          {"o_lambda", to_int(a.orientation)},
          {"o_gamma", to_int(b.orientation)},
          {"endpoint", Rational(a.endpoint + sum.eta() * b.endpoint).str()},
          {"endpoint_approx", format_double(sq.endpoint)}};
}

Json witness_to_json(const SumSystem& sum, const WitnessPair& pair) {
  return {{"epsilon", real_to_string_upward(pair.epsilon)},
          {"delta", real_to_string_upward(pair.delta)},
          {"square1", square_to_json(sum, pair.first)},
          {"square2", square_to_json(sum, pair.second)},
          {"verdict",
           {{"ratio_ok", pair.verdict.ratio_ok},
            {"orientation_ok", pair.verdict.orientation_ok},
            {"endpoint_ok", pair.verdict.endpoint_ok},
            {"margin", pair.verdict.margin}}},
          {"verified_exact", pair.verified_exact},
          {"depth", pair.depth},
          {"method", pair.method}};
}

WitnessPair witness_from_json(const SumSystem& sum, const Json& j) {
  if (!j.is_object()) fail("witness", "expected an object");
  for (const char* key : {"epsilon", "square1", "square2"})
    if (!j.contains(key)) fail("witness", std::string("missing key \"") + key + "\"");
  auto square = [&](const char* key) {
    const Json& s = j.at(key);
    if (!s.is_object() || !s.contains("u") || !s.contains("v")) fail(std::string("witness.") + key, "needs u and v");
    Word u = digits_from_json(s.at("u"), std::string("witness.") + key + ".u");
    Word v = digits_from_json(s.at("v"), std::string("witness.") + key + ".v");
    return make_square(sum, std::move(u), std::move(v));
  };
  WitnessPair pair;
  pair.first = square("square1");
  pair.second = square("square2");
  pair.epsilon = real_field(j.at("epsilon"), "witness.epsilon");
  pair.delta = j.contains("delta") ? real_field(j.at("delta"), "witness.delta") : pair.epsilon;
  if (j.contains("depth") && j.at("depth").is_number_integer()) pair.depth = j.at("depth").get<int>();
  if (j.contains("method") && j.at("method").is_string()) pair.method = j.at("method").get<std::string>();
  return pair;
}

std::string atlas_csv(const std::vector<AtlasRecord>& records, const Json& config) {
  std::string out = csv_header(config) + "index,eta,theta,eps,witness_found,depth_reached\n";
  for (const auto& r : records)
    out += std::to_string(r.index) + "," + format_double(r.eta) + "," + format_double(r.theta) + "," +
           format_double(r.eps) + "," + (r.witness_found ? "1" : "0") + "," + std::to_string(r.depth_reached) + "\n";
  return out;
}

std::string region_csv(const std::vector<RegionCell>& cells, const Json& config) {
  std::string out = csv_header(config) + "lam,gam,label\n";
  for (const auto& c : cells) out += format_double(c.lam) + "," + format_double(c.gam) + "," + region_name(c.label) + "\n";
  return out;
}

std::string covering_csv(const std::vector<std::pair<double, double>>& rows, const Json& config) {
  std::string out = csv_header(config) + "r,value\n";
  for (const auto& [r, v] : rows) out += format_double(r) + "," + format_double(v) + "\n";
  return out;
}

std::string density_csv(const std::vector<std::array<double, 3>>& rows, const Json& config) {
  std::string out = csv_header(config) + "a,r,estimate\n";
  for (const auto& row : rows)
    out += format_double(row[0]) + "," + format_double(row[1]) + "," + format_double(row[2]) + "\n";
  return out;
}

}  // namespace cantorsum
