#include "cantorsum/ifs_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cantorsum {

Sign sign_from_int(int o) {
  if (o == 1) return Sign::plus;
  if (o == -1) return Sign::minus;
  throw Error(ErrorCode::orientation_out_of_range, "orientation must be +1 or -1, got " + std::to_string(o));
}

ContractionMap make_map(int orientation, const Rational& ratio, const Rational& offset) {
  Sign o = sign_from_int(orientation);
  if (ratio <= 0 || ratio >= 1)
    throw Error(ErrorCode::ratio_out_of_range, "contraction ratio " + ratio.str() + " is outside (0,1)");
  return ContractionMap{o, ratio, offset};
}

// ---------------------------------------------------------------------------
// Word

Word Word::parse(std::string_view text) {
  std::vector<Digit> digits;
  auto bad = [&] { throw Error(ErrorCode::parse_error, "malformed word \"" + std::string(text) + "\""); };
  if (text.find('.') != std::string_view::npos) {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto dot = text.find('.', start);
      auto piece = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
      if (piece.empty()) bad();
      Digit d = 0;
      for (char c : piece) {
        if (c < '0' || c > '9') bad();
        d = d * 10 + static_cast<Digit>(c - '0');
      }
      if (d == 0) bad();
      digits.push_back(d);
      if (dot == std::string_view::npos) break;
      start = dot + 1;
    }
  } else {
    for (char c : text) {
      if (c < '1' || c > '9') bad();
      digits.push_back(static_cast<Digit>(c - '0'));
    }
  }
  return Word(std::move(digits));
}

Word Word::operator+(const Word& tail) const {
  std::vector<Digit> out = digits_;
  out.insert(out.end(), tail.digits_.begin(), tail.digits_.end());
  return Word(std::move(out));
}

std::string Word::str() const {
  bool dotted = std::any_of(digits_.begin(), digits_.end(), [](Digit d) { return d > 9; });
  std::string out;
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (dotted && i > 0) out += '.';
    out += std::to_string(digits_[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dimension and hull

double similarity_dimension(std::span<const double> ratios, double tol) {
  if (ratios.empty()) throw Error(ErrorCode::empty_system, "similarity dimension of an empty ratio list");
  if (!(tol > 0)) throw Error(ErrorCode::domain_error, "tolerance must be positive");
  for (double r : ratios)
    if (!(r > 0 && r < 1)) throw Error(ErrorCode::ratio_out_of_range, "ratio outside (0,1)");

  auto residual = [&](long double d) {
    long double s = 0;
    for (double r : ratios) s += std::pow(static_cast<long double>(r), d);
    return s - 1.0L;
  };
  if (ratios.size() == 1) return 0.0;

  double max_ratio = *std::max_element(ratios.begin(), ratios.end());
  long double lo = 0, hi = std::log(static_cast<long double>(ratios.size())) / -std::log(static_cast<long double>(max_ratio));
  for (int it = 0; it < 400 && hi - lo > 1e-18L * (1 + hi); ++it) {
    long double mid = (lo + hi) / 2;
    if (residual(mid) > 0) lo = mid; else hi = mid;
  }
  long double d = (lo + hi) / 2;
  // Newton polish, kept inside the bracket.
  for (int it = 0; it < 4; ++it) {
    long double f = residual(d), df = 0;
    for (double r : ratios) df += std::pow(static_cast<long double>(r), d) * std::log(static_cast<long double>(r));
    if (df == 0) break;
    long double next = d - f / df;
    if (next < lo || next > hi) break;
    d = next;
  }
  if (std::fabs(static_cast<double>(residual(d))) >= tol)
    throw Error(ErrorCode::no_convergence, "similarity dimension solver did not reach the residual tolerance");
  return static_cast<double>(d);
}

namespace {

struct EndpointChoice {
  std::size_t map;
  bool from_upper;  // F_i(hi) rather than F_i(lo)
};

Rational signed_ratio(const ContractionMap& m) {
  return m.orientation == Sign::plus ? m.ratio : Rational(-m.ratio);
}

bool solve_hull(std::span<const ContractionMap> maps, EndpointChoice low, EndpointChoice high, ExactInterval& out) {
  Rational s1 = signed_ratio(maps[low.map]), s2 = signed_ratio(maps[high.map]);
  // a = s1 * (low.from_upper ? b : a) + c1 ; b = s2 * (high.from_upper ? b : a) + c2
  Rational m11 = low.from_upper ? Rational(1) : Rational(1 - s1);
  Rational m12 = low.from_upper ? Rational(-s1) : Rational(0);
  Rational m21 = high.from_upper ? Rational(0) : Rational(-s2);
  Rational m22 = high.from_upper ? Rational(1 - s2) : Rational(1);
  const Rational& c1 = maps[low.map].offset;
  const Rational& c2 = maps[high.map].offset;
  Rational det = m11 * m22 - m12 * m21;
  if (det == 0) return false;
  Rational a = (c1 * m22 - m12 * c2) / det;
  Rational b = (m11 * c2 - m21 * c1) / det;
  if (a > b) return false;

  Rational lo_seen = b, hi_seen = a;
  for (const auto& m : maps) {
    Rational s = signed_ratio(m);
    Rational fa = s * a + m.offset, fb = s * b + m.offset;
    lo_seen = std::min({lo_seen, fa, fb});
    hi_seen = std::max({hi_seen, fa, fb});
  }
  if (lo_seen != a || hi_seen != b) return false;
  out = {a, b};
  return true;
}

}  // namespace

ExactInterval convex_hull(std::span<const ContractionMap> maps, double tol) {
  if (maps.empty()) throw Error(ErrorCode::empty_system, "system has no maps");
  const std::size_t n = maps.size();
  std::vector<double> s(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = to_double(signed_ratio(maps[i]));
    c[i] = to_double(maps[i].offset);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double p = c[i] / (1 - s[i]);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  bool converged = false;
  for (int it = 0; it < 100000; ++it) {
    double nlo = std::numeric_limits<double>::infinity(), nhi = -nlo;
    for (std::size_t i = 0; i < n; ++i) {
      double a = s[i] * lo + c[i], b = s[i] * hi + c[i];
      nlo = std::min({nlo, a, b});
      nhi = std::max({nhi, a, b});
    }
    bool done = std::fabs(nlo - lo) < tol * (1 + std::fabs(lo)) && std::fabs(nhi - hi) < tol * (1 + std::fabs(hi));
    lo = nlo;
    hi = nhi;
    if (done) {
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorCode::no_convergence, "convex hull iteration did not settle");

  // Endpoint selections that attain the limit; the exact solve decides among near-ties.
  const double slack = 1e-9 * (1 + std::fabs(lo) + std::fabs(hi));
  std::vector<EndpointChoice> low_choices, high_choices;
  for (std::size_t i = 0; i < n; ++i) {
    for (bool upper : {false, true}) {
      double v = s[i] * (upper ? hi : lo) + c[i];
      if (std::fabs(v - lo) <= slack) low_choices.push_back({i, upper});
      if (std::fabs(v - hi) <= slack) high_choices.push_back({i, upper});
    }
  }
  ExactInterval hull;
  for (const auto& lc : low_choices)
    for (const auto& hc : high_choices)
      if (solve_hull(maps, lc, hc, hull)) return hull;
  throw Error(ErrorCode::no_convergence, "convex hull endpoints could not be confirmed exactly");
}

// ---------------------------------------------------------------------------
// AffineCantorSystem

AffineCantorSystem validate_system(std::vector<ContractionMap> maps, double dimension_tol, double hull_tol) {
  if (maps.empty()) throw Error(ErrorCode::empty_system, "system has no maps");
  AffineCantorSystem sys;
  for (const auto& m : maps) {
    if (m.ratio <= 0 || m.ratio >= 1)
      throw Error(ErrorCode::ratio_out_of_range, "contraction ratio " + m.ratio.str() + " is outside (0,1)");
    sys.ratio_f_.push_back(to_double(m.ratio));
    sys.log_ratio_.push_back(std::log(sys.ratio_f_.back()));
    sys.offset_f_.push_back(to_double(m.offset));
  }
  sys.maps_ = std::move(maps);
  sys.dimension_ = similarity_dimension(sys.ratio_f_, dimension_tol);
  sys.hull_ = convex_hull(sys.maps_, hull_tol);
  sys.hull_lo_ = to_double(sys.hull_.lo);
  sys.hull_hi_ = to_double(sys.hull_.hi);
  sys.diameter_ = sys.hull_.hi - sys.hull_.lo;
  const auto& first = sys.maps_.front();
  sys.anchor_ = first.offset / (1 - signed_ratio(first));
  sys.anchor_f_ = to_double(sys.anchor_);
  return sys;
}

double AffineCantorSystem::min_ratio() const noexcept { return *std::min_element(ratio_f_.begin(), ratio_f_.end()); }
double AffineCantorSystem::max_ratio() const noexcept { return *std::max_element(ratio_f_.begin(), ratio_f_.end()); }

bool AffineCantorSystem::homogeneous() const noexcept {
  return std::all_of(maps_.begin(), maps_.end(), [&](const ContractionMap& m) { return m.ratio == maps_.front().ratio; });
}

bool AffineCantorSystem::orientation_preserving() const noexcept {
  return std::all_of(maps_.begin(), maps_.end(), [](const ContractionMap& m) { return m.orientation == Sign::plus; });
}

void AffineCantorSystem::check_word(const Word& w) const {
  for (auto d : w)
    if (d < 1 || d > maps_.size())
      throw Error(ErrorCode::invalid_digit, "digit " + std::to_string(d) + " is not a map index (system has " +
                                                std::to_string(maps_.size()) + " maps)");
}

// ---------------------------------------------------------------------------
// Words

WordStats word_stats(const AffineCantorSystem& system, const Word& word) {
  system.check_word(word);
  WordStats st;
  double x = system.anchor();
  for (std::size_t k = word.size(); k-- > 0;) x = system.apply(word[k], x);
  for (auto d : word) {
    st.ratio *= system.ratio(d);
    st.log_ratio += system.log_ratio(d);
    st.orientation = st.orientation * system.orientation(d);
  }
  st.endpoint = x;
  return st;
}

ExactWordStats exact_word_stats(const AffineCantorSystem& system, const Word& word) {
  system.check_word(word);
  ExactWordStats st;
  for (auto d : word) {
    const auto& m = system.maps()[d - 1];
    st.ratio *= m.ratio;
    st.orientation = st.orientation * m.orientation;
  }
  st.endpoint = exact_apply_word(system, word, system.exact_anchor());
  return st;
}

double apply_word(const AffineCantorSystem& system, const Word& word, double x) {
  system.check_word(word);
  for (std::size_t k = word.size(); k-- > 0;) x = system.apply(word[k], x);
  return x;
}

Rational exact_apply_word(const AffineCantorSystem& system, const Word& word, const Rational& x0) {
  system.check_word(word);
  Rational x = x0;
  for (std::size_t k = word.size(); k-- > 0;) {
    const auto& m = system.maps()[word[k] - 1];
    x = signed_ratio(m) * x + m.offset;
  }
  return x;
}

Interval word_image(const AffineCantorSystem& system, const Word& word) {
  double a = apply_word(system, word, system.hull().lo);
  double b = apply_word(system, word, system.hull().hi);
  return {std::min(a, b), std::max(a, b)};
}

// ---------------------------------------------------------------------------
// SumSystem

SumSystem::SumSystem(AffineCantorSystem lambda_system, AffineCantorSystem gamma_system, Rational eta)
    : lambda_(std::move(lambda_system)), gamma_(std::move(gamma_system)), eta_(std::move(eta)) {
  if (eta_ <= 0) throw Error(ErrorCode::nonpositive_eta, "eta must be positive, got " + eta_.str());
  eta_f_ = to_double(eta_);
  r_min_ = std::min(lambda_.min_ratio(), gamma_.min_ratio());
  Rational scaled_gamma = eta_ * gamma_.diameter();
  big_d_ = std::max(lambda_.diameter(), scaled_gamma);
  big_d_f_ = to_double(big_d_);
  Rational dl = lambda_.diameter() > 0 ? lambda_.diameter() : Rational(1);
  Rational dg = gamma_.diameter() > 0 ? gamma_.diameter() : Rational(1);
  kappa_ = dl / (eta_ * dg);
  log_kappa_ = std::log(to_double(dl)) - std::log(eta_f_) - std::log(to_double(dg));
}

double sum_endpoint(const SumSystem& sum, const Word& u, const Word& v) {
  return word_stats(sum.lambda_system(), u).endpoint + sum.eta_f() * word_stats(sum.gamma_system(), v).endpoint;
}

Rational exact_sum_endpoint(const SumSystem& sum, const Word& u, const Word& v) {
  return exact_word_stats(sum.lambda_system(), u).endpoint + sum.eta() * exact_word_stats(sum.gamma_system(), v).endpoint;
}

}  // namespace cantorsum
