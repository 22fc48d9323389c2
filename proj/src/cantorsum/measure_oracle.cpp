#include "cantorsum/measure_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace cantorsum {

namespace {

void require_cantor(const SumSystem& sum) {
  if (sum.lambda_system().size() < 2 || sum.gamma_system().size() < 2)
    throw Error(ErrorCode::degenerate_system, "each system needs at least two maps (a single map has a point attractor)");
}

struct SideCell {
  Interval image;
  double mass;
};

std::vector<SideCell> side_cells(const AffineCantorSystem& system, const std::vector<Word>& words, double scale) {
  std::vector<SideCell> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    Interval img = word_image(system, w);
    out.push_back({{scale * img.lo, scale * img.hi},
                   std::pow(word_stats(system, w).ratio, system.dimension())});
  }
  return out;
}

}  // namespace

double cylinder_measure(const SumSystem& sum, const Word& u, const Word& v) {
  const auto& ls = sum.lambda_system();
  const auto& gs = sum.gamma_system();
  WordStats a = word_stats(ls, u), b = word_stats(gs, v);
  return std::exp(ls.dimension() * a.log_ratio + gs.dimension() * b.log_ratio);
}

std::vector<Rational> rational_weights(const AffineCantorSystem& system) {
  const std::size_t n = system.size();
  std::vector<Rational> w(n);
  if (system.homogeneous()) {
    for (auto& x : w) x = Rational(1, static_cast<long>(n));
    return w;
  }
  const Integer denom = Integer(1) << 60;
  Rational total{0};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double p = std::pow(system.ratio(static_cast<Word::Digit>(i + 1)), system.dimension());
    w[i] = Rational(Integer(static_cast<long long>(std::llround(std::ldexp(p, 60)))), denom);
    total += w[i];
  }
  w[n - 1] = 1 - total;
  return w;
}

Rational exact_cylinder_mass(const SumSystem& sum, const Word& u, const Word& v) {
  sum.lambda_system().check_word(u);
  sum.gamma_system().check_word(v);
  auto wl = rational_weights(sum.lambda_system());
  auto wg = rational_weights(sum.gamma_system());
  Rational m{1};
  for (auto d : u) m *= wl[d - 1];
  for (auto d : v) m *= wg[d - 1];
  return m;
}

std::vector<Word> side_partition(const AffineCantorSystem& system, double r) {
  if (!(r > 0 && r < 1)) throw Error(ErrorCode::domain_error, "r must lie in (0,1)");
  std::vector<Word> out;
  struct Frame {
    Word word;
    double ratio;
  };
  // Products that agree with r to rounding count as r, so r = base^-k is stable.
  const double cut = r * (1 - 1e-12);
  std::vector<Frame> stack{{Word{}, 1.0}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.ratio < cut) {
      out.push_back(std::move(f.word));
      continue;
    }
    // Reverse push keeps the output in lexicographic order.
    for (auto d = static_cast<Word::Digit>(system.size()); d >= 1; --d) {
      Word child = f.word;
      child.push_back(d);
      stack.push_back({std::move(child), f.ratio * system.ratio(d)});
    }
  }
  return out;
}

std::vector<CylinderSquare> r_square_decomposition(const SumSystem& sum, double r) {
  auto us = side_partition(sum.lambda_system(), r);
  auto vs = side_partition(sum.gamma_system(), r);
  std::vector<CylinderSquare> out;
  out.reserve(us.size() * vs.size());
  for (const auto& u : us)
    for (const auto& v : vs) out.push_back(make_square(sum, u, v));
  return out;
}

Interval sum_image(const SumSystem& sum, const Word& u, const Word& v) {
  Interval a = word_image(sum.lambda_system(), u);
  Interval b = word_image(sum.gamma_system(), v);
  return {a.lo + sum.eta_f() * b.lo, a.hi + sum.eta_f() * b.hi};
}

double density_estimate(const SumSystem& sum, double a, double r) {
  require_cantor(sum);
  if (!(r > 0 && r < 1)) throw Error(ErrorCode::domain_error, "r must lie in (0,1)");
  auto lc = side_cells(sum.lambda_system(), side_partition(sum.lambda_system(), r), 1.0);
  auto gc = side_cells(sum.gamma_system(), side_partition(sum.gamma_system(), r), sum.eta_f());
  double mass = 0;
  for (const auto& x : lc)
    for (const auto& y : gc)
      if (x.image.lo + y.image.lo <= a + r && x.image.hi + y.image.hi >= a - r) mass += x.mass * y.mass;
  return mass / std::pow(r, sum.sum_dimension());
}

std::size_t count_y_r(const SumSystem& sum, double a, double r) {
  require_cantor(sum);
  if (!(r > 0 && r < 1)) throw Error(ErrorCode::domain_error, "r must lie in (0,1)");
  auto lc = side_cells(sum.lambda_system(), side_partition(sum.lambda_system(), r), 1.0);
  auto gc = side_cells(sum.gamma_system(), side_partition(sum.gamma_system(), r), sum.eta_f());
  std::size_t count = 0;
  for (const auto& x : lc)
    for (const auto& y : gc)
      if (x.image.lo + y.image.lo <= a + r && x.image.hi + y.image.hi >= a - r) ++count;
  return count;
}

double covering_sum(const SumSystem& sum, double r, CoveringMode mode) {
  require_cantor(sum);
  if (!(r > 0 && r < 1)) throw Error(ErrorCode::domain_error, "r must lie in (0,1)");
  auto lc = side_cells(sum.lambda_system(), side_partition(sum.lambda_system(), r), 1.0);
  auto gc = side_cells(sum.gamma_system(), side_partition(sum.gamma_system(), r), sum.eta_f());
  const double s = sum.sum_dimension();
  std::vector<Interval> images;
  images.reserve(lc.size() * gc.size());
  for (const auto& x : lc)
    for (const auto& y : gc) images.push_back({x.image.lo + y.image.lo, x.image.hi + y.image.hi});

  double total = 0;
  if (mode == CoveringMode::raw) {
    for (const auto& iv : images) total += std::pow(iv.length(), s);
    return total;
  }
  std::sort(images.begin(), images.end(), [](const Interval& p, const Interval& q) { return p.lo < q.lo; });
  Interval cur = images.front();
  for (std::size_t i = 1; i < images.size(); ++i) {
    if (images[i].lo <= cur.hi) {
      cur.hi = std::max(cur.hi, images[i].hi);
    } else {
      total += std::pow(cur.length(), s);
      cur = images[i];
    }
  }
  total += std::pow(cur.length(), s);
  return total;
}

PigeonholeBound pigeonhole_bound(double eps, double eta_const, PigeonholeReading reading) {
  if (!(eps > 0 && eps < 1)) throw Error(ErrorCode::domain_error, "eps must lie in (0,1)");
  if (!(eta_const > 0 && eta_const < 1)) throw Error(ErrorCode::domain_error, "eta must lie in (0,1)");
  double divisor = reading == PigeonholeReading::log_scaled ? std::fabs(std::log(eps)) : eps;
  PigeonholeBound out;
  out.m = static_cast<long long>(std::floor(std::fabs(std::log(eta_const)) / divisor)) + 1;
  double m1 = static_cast<double>(out.m + 1);
  out.bound = m1 * m1 * 20.0 / (eta_const * eps);
  return out;
}

}  // namespace cantorsum
