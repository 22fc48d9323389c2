#include "cantorsum/square_search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <thread>
#include <unordered_map>

namespace cantorsum {

namespace {

Rational exact_ratio(const AffineCantorSystem& system, const Word& word) {
  system.check_word(word);
  Rational q{1};
  for (auto d : word) q *= system.maps()[d - 1].ratio;
  return q;
}

bool inside_exp_window(const Real& q, const Real& log_width) {
  return certainly_less(exp(-log_width), q) && certainly_less(q, exp(log_width));
}

}  // namespace

CylinderSquare make_square(const SumSystem& sum, Word u, Word v) {
  WordStats a = word_stats(sum.lambda_system(), u);
  WordStats b = word_stats(sum.gamma_system(), v);
  CylinderSquare sq;
  sq.u = std::move(u);
  sq.v = std::move(v);
  sq.lambda_u = a.ratio;
  sq.gamma_v = b.ratio;
  sq.o_lambda = a.orientation;
  sq.o_gamma = b.orientation;
  sq.endpoint = a.endpoint + sum.eta_f() * b.endpoint;
  sq.log_lambda = a.log_ratio;
  sq.log_gamma = b.log_ratio;
  return sq;
}

bool is_delta_square(const SumSystem& sum, const CylinderSquare& sq, double delta) {
  return std::fabs(sum.log_size_factor() + sq.log_lambda - sq.log_gamma) < delta;
}

bool is_delta_square_exact(const SumSystem& sum, const Word& u, const Word& v, const Real& delta) {
  Rational q = sum.size_factor() * exact_ratio(sum.lambda_system(), u) / exact_ratio(sum.gamma_system(), v);
  return inside_exp_window(to_real(q), delta);
}

ClosenessVerdict relative_closeness(const SumSystem& sum, const CylinderSquare& a, const CylinderSquare& b,
                                    double eps) {
  ClosenessVerdict out;
  out.ratio_ok = std::fabs(a.log_lambda - b.log_lambda) < eps && std::fabs(a.log_gamma - b.log_gamma) < eps;
  out.orientation_ok = a.o_lambda == b.o_lambda && a.o_gamma == b.o_gamma;
  double scale = eps * sum.big_d_f() * std::min({a.lambda_u, b.lambda_u, a.gamma_v, b.gamma_v});
  double diff = std::fabs(a.endpoint - b.endpoint);
  out.endpoint_ok = diff < scale;
  out.margin = (scale - diff) / scale;
  return out;
}

ClosenessVerdict exact_closeness(const SumSystem& sum, const CylinderSquare& a, const CylinderSquare& b,
                                 const Real& eps) {
  const auto& ls = sum.lambda_system();
  const auto& gs = sum.gamma_system();
  ExactWordStats la = exact_word_stats(ls, a.u), lb = exact_word_stats(ls, b.u);
  ExactWordStats ga = exact_word_stats(gs, a.v), gb = exact_word_stats(gs, b.v);

  ClosenessVerdict out;
  out.ratio_ok = inside_exp_window(to_real(Rational(la.ratio / lb.ratio)), eps) &&
                 inside_exp_window(to_real(Rational(ga.ratio / gb.ratio)), eps);
  out.orientation_ok = la.orientation == lb.orientation && ga.orientation == gb.orientation;

  Rational diff = abs_rational((la.endpoint - lb.endpoint) + sum.eta() * (ga.endpoint - gb.endpoint));
  Rational smallest = std::min({la.ratio, lb.ratio, ga.ratio, gb.ratio});
  Real scale = eps * to_real(Rational(sum.big_d() * smallest));
  Real gap = to_real(diff);
  out.endpoint_ok = certainly_less(gap, scale);
  out.margin = scale > 0 ? to_double(Real((scale - gap) / scale)) : -std::numeric_limits<double>::infinity();
  return out;
}

bool verify_witness(const SumSystem& sum, WitnessPair& pair) {
  pair.verdict = exact_closeness(sum, pair.first, pair.second, pair.epsilon);
  pair.verified_exact = !pair.first.same_words(pair.second) && pair.verdict.close() &&
                        is_delta_square_exact(sum, pair.first.u, pair.first.v, pair.delta) &&
                        is_delta_square_exact(sum, pair.second.u, pair.second.v, pair.delta);
  return pair.verified_exact;
}

WitnessPair make_pair(const SumSystem& sum, CylinderSquare a, CylinderSquare b, const Real& eps, const Real& delta) {
  WitnessPair pair;
  pair.first = std::move(a);
  pair.second = std::move(b);
  pair.epsilon = eps;
  pair.delta = delta;
  verify_witness(sum, pair);
  return pair;
}

// ---------------------------------------------------------------------------
// Band search

namespace {

constexpr double kScreenRelative = 1e-9;
constexpr double kBandSlack = 1e-9;

struct SideWord {
  Word word;
  double log_ratio = 0.0;
  double ratio = 1.0;
  double phys = 0.0;   // log of the physical size of the word's image
  double slope = 1.0;  // O_w * ratio_w
  double shift = 0.0;  // F_w(0)
  double endpoint = 0.0;
  Sign orientation = Sign::plus;
};

class BandGenerator {
 public:
  BandGenerator(const AffineCantorSystem& system, double log_size, double top, double band_width, double floor,
                std::size_t max_words)
      : system_(system), top_(top), width_(band_width), floor_(floor), max_words_(max_words) {
    SideWord root;
    root.phys = log_size;
    root.endpoint = system.anchor();
    frontier_.push_back(std::move(root));
    generated_ = 1;
  }

  int band_of(double phys) const { return static_cast<int>(std::floor((top_ - phys) / width_ + kBandSlack)); }

  bool exhausted() const { return frontier_.empty(); }

  /// Words of band exactly k, in word order; valid once bands < k were emitted.
  std::vector<SideWord> emit(int k) {
    std::vector<SideWord> out, keep, stack;
    for (auto& w : frontier_) (band_of(w.phys) <= k ? stack : keep).push_back(std::move(w));
    frontier_.clear();
    while (!stack.empty()) {
      SideWord w = std::move(stack.back());
      stack.pop_back();
      if (band_of(w.phys) > k) {
        keep.push_back(std::move(w));
        continue;
      }
      for (Word::Digit d = 1; d <= system_.size(); ++d) {
        double ratio = w.ratio * system_.ratio(d);
        if (ratio < floor_ * (1 - 1e-12)) continue;
        SideWord c;
        c.word = w.word;
        c.word.push_back(d);
        c.ratio = ratio;
        c.log_ratio = w.log_ratio + system_.log_ratio(d);
        c.phys = w.phys + system_.log_ratio(d);
        double sd = system_.orientation(d) == Sign::plus ? system_.ratio(d) : -system_.ratio(d);
        c.slope = w.slope * sd;
        c.shift = w.slope * system_.offset(d) + w.shift;
        c.endpoint = c.slope * system_.anchor() + c.shift;
        c.orientation = w.orientation * system_.orientation(d);
        if (++generated_ > max_words_)
          throw Error(ErrorCode::budget_exceeded, "word budget exhausted before reaching the scale floor");
        stack.push_back(std::move(c));
      }
      out.push_back(std::move(w));
    }
    frontier_ = std::move(keep);
    std::sort(out.begin(), out.end(), [](const SideWord& a, const SideWord& b) { return a.word < b.word; });
    return out;
  }

 private:
  const AffineCantorSystem& system_;
  double top_, width_, floor_;
  std::size_t max_words_;
  std::size_t generated_ = 0;
  std::vector<SideWord> frontier_;
};

struct Sq {
  const SideWord* u;
  const SideWord* v;
  double endpoint;
  double min_ratio;
};

struct BucketKey {
  int ou, ov;
  long long bl, bg;
  bool operator==(const BucketKey&) const = default;
};

struct BucketHash {
  std::size_t operator()(const BucketKey& k) const noexcept {
    std::size_t h = static_cast<std::size_t>(k.bl) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::size_t>(k.bg) + 0x7F4A7C15ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::size_t>((k.ou + 1) * 3 + (k.ov + 1));
    return h;
  }
};

struct Candidate {
  const Sq* a;
  const Sq* b;
};

bool sq_less(const Sq* a, const Sq* b) {
  if (a->u->word != b->u->word) return a->u->word < b->u->word;
  return a->v->word < b->v->word;
}

bool candidate_less(const Candidate& x, const Candidate& y) {
  if (sq_less(x.a, y.a)) return true;
  if (sq_less(y.a, x.a)) return false;
  return sq_less(x.b, y.b);
}

bool candidate_equal(const Candidate& x, const Candidate& y) {
  return !candidate_less(x, y) && !candidate_less(y, x);
}

CylinderSquare to_square(const SumSystem& sum, const Sq& s) {
  CylinderSquare out;
  out.u = s.u->word;
  out.v = s.v->word;
  out.lambda_u = s.u->ratio;
  out.gamma_v = s.v->ratio;
  out.o_lambda = s.u->orientation;
  out.o_gamma = s.v->orientation;
  out.endpoint = s.endpoint;
  out.log_lambda = s.u->log_ratio;
  out.log_gamma = s.v->log_ratio;
  (void)sum;
  return out;
}

}  // namespace

SearchOutcome find_witness(const SumSystem& sum, double eps, const SearchOptions& options) {
  if (!(eps > 0)) throw Error(ErrorCode::domain_error, "eps must be positive");
  if (!(options.scale_floor > 0 && options.scale_floor < 1))
    throw Error(ErrorCode::domain_error, "scale floor must lie in (0,1)");
  const double delta = options.delta.value_or(eps);
  if (!(delta > 0)) throw Error(ErrorCode::domain_error, "delta must be positive");

  const auto& ls = sum.lambda_system();
  const auto& gs = sum.gamma_system();
  const double dl = ls.diameter() > 0 ? ls.diameter_f() : 1.0;
  const double dg = gs.diameter() > 0 ? gs.diameter_f() : 1.0;
  const double log_l = std::log(dl);
  const double log_g = std::log(sum.eta_f() * dg);
  const double top = std::max(log_l, log_g);
  const double width = -std::log(sum.r_min());

  // Screens are looser than the exact predicates so that nothing qualifying is dropped.
  const double eps_s = eps * (1 + kScreenRelative) + 1e-12;
  const double delta_s = delta * (1 + kScreenRelative) + 1e-12;
  const double big_d = sum.big_d_f();
  const double abs_slack = 64 * std::numeric_limits<double>::epsilon() *
                           (std::fabs(ls.hull().lo) + std::fabs(ls.hull().hi) +
                            sum.eta_f() * (std::fabs(gs.hull().lo) + std::fabs(gs.hull().hi)) + big_d);

  BandGenerator lam(ls, log_l, top, width, options.scale_floor, options.budget.max_words);
  BandGenerator gam(gs, log_g, top, width, options.scale_floor, options.budget.max_words);

  std::deque<std::vector<SideWord>> lambda_bands;  // stable storage
  std::deque<std::vector<SideWord>> gamma_bands;
  std::vector<const SideWord*> gamma_pool;  // sorted by phys
  int gamma_emitted = -1;

  const int lookahead = static_cast<int>(std::ceil(delta_s / width)) + 1;
  const int window = static_cast<int>(std::ceil(eps_s / width)) + 1;
  std::deque<std::vector<Sq>> square_bands;  // last window+1 bands of squares

  SearchOutcome outcome;
  const unsigned threads = std::max(1u, options.budget.threads);

  for (int k = 0;; ++k) {
    lambda_bands.push_back(lam.emit(k));
    const auto& lwords = lambda_bands.back();

    while (gamma_emitted < k + lookahead && !gam.exhausted()) {
      ++gamma_emitted;
      gamma_bands.push_back(gam.emit(gamma_emitted));
      for (const auto& w : gamma_bands.back()) gamma_pool.push_back(&w);
    }
    std::stable_sort(gamma_pool.begin(), gamma_pool.end(),
                     [](const SideWord* a, const SideWord* b) { return a->phys < b->phys; });

    // Squares whose lambda side lies in band k.
    std::vector<Sq> fresh;
    for (const auto& u : lwords) {
      auto lo = std::lower_bound(gamma_pool.begin(), gamma_pool.end(), u.phys - delta_s,
                                 [](const SideWord* w, double x) { return w->phys < x; });
      for (auto it = lo; it != gamma_pool.end() && (*it)->phys < u.phys + delta_s; ++it) {
        const SideWord* v = *it;
        if (std::fabs(u.phys - v->phys) >= delta_s) continue;
        if (options.balanced_orientation && u.orientation != v->orientation) continue;
        fresh.push_back({&u, v, u.endpoint + sum.eta_f() * v->endpoint, std::min(u.ratio, v->ratio)});
      }
    }
    outcome.squares_examined += fresh.size();
    if (outcome.squares_examined > options.budget.max_squares)
      throw Error(ErrorCode::budget_exceeded, "square budget exhausted before reaching the scale floor");
    square_bands.push_back(std::move(fresh));
    while (static_cast<int>(square_bands.size()) > window + 1) square_bands.pop_front();

    // Bucket the window by orientation pair and log-ratio cells of width eps_s.
    std::unordered_map<BucketKey, std::vector<const Sq*>, BucketHash> buckets;
    auto key_of = [&](const Sq& s) {
      return BucketKey{to_int(s.u->orientation), to_int(s.v->orientation),
                       static_cast<long long>(std::floor(s.u->log_ratio / eps_s)),
                       static_cast<long long>(std::floor(s.v->log_ratio / eps_s))};
    };
    for (const auto& band : square_bands)
      for (const auto& s : band) buckets[key_of(s)].push_back(&s);
    for (auto& [key, list] : buckets)
      std::sort(list.begin(), list.end(), [](const Sq* a, const Sq* b) { return a->endpoint < b->endpoint; });

    const std::vector<Sq>& current = square_bands.back();
    auto scan = [&](std::size_t begin, std::size_t end, std::vector<Candidate>& found) {
      for (std::size_t i = begin; i < end; ++i) {
        const Sq& a = current[i];
        BucketKey base = key_of(a);
        double radius = eps_s * big_d * a.min_ratio + abs_slack;
        for (long long dl_ = -1; dl_ <= 1; ++dl_) {
          for (long long dg_ = -1; dg_ <= 1; ++dg_) {
            auto it = buckets.find({base.ou, base.ov, base.bl + dl_, base.bg + dg_});
            if (it == buckets.end()) continue;
            const auto& list = it->second;
            auto lo = std::lower_bound(list.begin(), list.end(), a.endpoint - radius,
                                       [](const Sq* s, double x) { return s->endpoint < x; });
            for (auto jt = lo; jt != list.end() && (*jt)->endpoint <= a.endpoint + radius; ++jt) {
              const Sq& b = **jt;
              if (&a == &b) continue;
              if (std::fabs(a.u->log_ratio - b.u->log_ratio) >= eps_s) continue;
              if (std::fabs(a.v->log_ratio - b.v->log_ratio) >= eps_s) continue;
              double limit = eps_s * big_d * std::min(a.min_ratio, b.min_ratio) + abs_slack;
              if (std::fabs(a.endpoint - b.endpoint) >= limit) continue;
              if (a.u->word == b.u->word && a.v->word == b.v->word) continue;
              found.push_back(sq_less(&a, &b) ? Candidate{&a, &b} : Candidate{&b, &a});
            }
          }
        }
      }
    };

    std::vector<Candidate> candidates;
    if (threads == 1 || current.size() < 2048) {
      scan(0, current.size(), candidates);
    } else {
      std::vector<std::vector<Candidate>> parts(threads);
      std::vector<std::thread> pool;
      std::size_t chunk = (current.size() + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        std::size_t b = std::min(current.size(), t * chunk), e = std::min(current.size(), b + chunk);
        pool.emplace_back([&, b, e, t] { scan(b, e, parts[t]); });
      }
      for (auto& th : pool) th.join();
      for (auto& p : parts) candidates.insert(candidates.end(), p.begin(), p.end());
    }

    std::sort(candidates.begin(), candidates.end(), candidate_less);
    candidates.erase(std::unique(candidates.begin(), candidates.end(), candidate_equal), candidates.end());
    for (const auto& c : candidates) {
      WitnessPair pair = make_pair(sum, to_square(sum, *c.a), to_square(sum, *c.b), Real(eps), Real(delta));
      if (pair.verified_exact) {
        pair.depth = k;
        pair.method = "search";
        outcome.witness = std::move(pair);
        outcome.depth_reached = k;
        return outcome;
      }
    }

    outcome.depth_reached = k;
    if (lam.exhausted()) break;

    // Gamma words above every future lambda band can no longer be paired.
    double cutoff = top - (k + 1) * width + delta_s + 1e-9;
    gamma_pool.erase(std::remove_if(gamma_pool.begin(), gamma_pool.end(),
                                    [&](const SideWord* w) { return w->phys > cutoff; }),
                     gamma_pool.end());
    while (static_cast<int>(lambda_bands.size()) > window + 2) lambda_bands.pop_front();
    // Gamma storage is kept while any square in the window may point into it.
    while (!gamma_bands.empty() &&
           gamma_emitted - static_cast<int>(gamma_bands.size()) + 1 < k - window - lookahead - 1)
      gamma_bands.pop_front();
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// Homogeneous corners

std::pair<int, int> homogeneous_corner_witness(double lambda, double gamma, double eps) {
  if (!(lambda > 0 && lambda < 1 && gamma > 0 && gamma < 1))
    throw Error(ErrorCode::domain_error, "ratios must lie in (0,1)");
  if (!(eps > 0)) throw Error(ErrorCode::domain_error, "eps must be positive");
  const long double a = -std::log(static_cast<long double>(lambda));
  const long double b = -std::log(static_cast<long double>(gamma));
  const long double threshold = std::log1p(static_cast<long double>(eps));

  long long best_total = std::numeric_limits<long long>::max();
  long double best_dev = 0;
  std::pair<long long, long long> best{0, 0};
  for (long long n = 1; n + 1 <= best_total; ++n) {
    if (n > 100'000'000) throw Error(ErrorCode::no_convergence, "corner search did not terminate");
    long double centre = n * a / b, spread = threshold / b;
    long long m_lo = std::max<long long>(1, static_cast<long long>(std::ceil(centre - spread)) - 1);
    long long m_hi = static_cast<long long>(std::floor(centre + spread)) + 1;
    for (long long m = m_lo; m <= m_hi; ++m) {
      long double dev = std::fabs(n * a - m * b);
      if (!(dev < threshold)) continue;
      long long total = n + m;
      if (total < best_total || (total == best_total && dev < best_dev)) {
        best_total = total;
        best_dev = dev;
        best = {n, m};
      }
    }
  }
  return {static_cast<int>(best.first), static_cast<int>(best.second)};
}

namespace {

std::optional<Word::Digit> fixing_map(const AffineCantorSystem& system, const Rational& point) {
  for (std::size_t i = 0; i < system.size(); ++i) {
    const auto& m = system.maps()[i];
    if (m.ratio * point + m.offset == point) return static_cast<Word::Digit>(i + 1);
  }
  return std::nullopt;
}

}  // namespace

std::optional<WitnessPair> corner_witness(const SumSystem& sum, double eps) {
  const auto& ls = sum.lambda_system();
  const auto& gs = sum.gamma_system();
  if (!ls.homogeneous() || !gs.homogeneous() || !ls.orientation_preserving() || !gs.orientation_preserving())
    return std::nullopt;
  if (sum.eta() != 1 || ls.diameter() != gs.diameter() || ls.diameter() == 0) return std::nullopt;
  auto il = fixing_map(ls, ls.exact_hull().lo), ir = fixing_map(ls, ls.exact_hull().hi);
  auto jl = fixing_map(gs, gs.exact_hull().lo), jr = fixing_map(gs, gs.exact_hull().hi);
  if (!il || !ir || !jl || !jr) return std::nullopt;

  auto [n, m] = homogeneous_corner_witness(ls.ratio(1), gs.ratio(1), eps);
  CylinderSquare a = make_square(sum, Word::repeat(*ir, n), Word::repeat(*jl, m));
  CylinderSquare b = make_square(sum, Word::repeat(*il, n), Word::repeat(*jr, m));
  if (square_less(b, a)) std::swap(a, b);
  WitnessPair pair = make_pair(sum, std::move(a), std::move(b), Real(eps), Real(eps));
  if (!pair.verified_exact) return std::nullopt;
  const double top = std::max(std::log(ls.diameter_f()), std::log(gs.diameter_f()));
  const double phys = std::log(ls.diameter_f()) + n * ls.log_ratio(1);
  pair.depth = static_cast<int>(std::floor((top - phys) / -std::log(sum.r_min()) + kBandSlack));
  pair.method = "corner";
  return pair;
}

SearchOutcome certify_zero(const SumSystem& sum, double eps, const SearchOptions& options) {
  if (!(eps > 0)) throw Error(ErrorCode::domain_error, "eps must be positive");
  if (auto corner = corner_witness(sum, eps)) {
    SearchOutcome out;
    out.depth_reached = corner->depth;
    out.witness = std::move(corner);
    return out;
  }
  return find_witness(sum, eps, options);
}

}  // namespace cantorsum
