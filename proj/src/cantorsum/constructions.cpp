#include "cantorsum/square_search.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cantorsum {

namespace {

Real exact_ratio_real(const AffineCantorSystem& system, const Word& word) {
  Rational q{1};
  for (auto d : word) q *= system.maps()[d - 1].ratio;
  return to_real(q);
}

void require_prefix_square(const SumSystem& sum, const CylinderSquare& sq, const Real& delta_prime) {
  if (sq.o_lambda != sq.o_gamma)
    throw Error(ErrorCode::orientation_mismatch, "square " + sq.u.str() + " x " + sq.v.str() +
                                                     " has opposite orientation products");
  if (!(delta_prime > 0)) throw Error(ErrorCode::domain_error, "delta' must be positive");
  if (!is_delta_square_exact(sum, sq.u, sq.v, delta_prime))
    throw Error(ErrorCode::domain_error, "square " + sq.u.str() + " x " + sq.v.str() + " is not a delta'-square");
}

}  // namespace

Real concat_left_bound(const Real& eps, const Real& delta, const Real& delta_prime, const Real& lambda_u1) {
  return eps * exp(delta_prime) + 2 * abs(exp(delta_prime) - 1) * exp(delta_prime + delta + eps) / lambda_u1;
}

Real concat_right_bound(const Real& eps, const Real& delta, const Real& delta_prime, const Real& lambda_s) {
  return exp(delta_prime) / lambda_s * (eps + 2 * exp(eps + delta) * abs(exp(eps) - 1));
}

WitnessPair concat_left(const SumSystem& sum, const CylinderSquare& prefix, const WitnessPair& pair,
                        const Real& delta_prime) {
  require_prefix_square(sum, prefix, delta_prime);
  Real bound = concat_left_bound(pair.epsilon, pair.delta, delta_prime,
                                 exact_ratio_real(sum.lambda_system(), pair.first.u));
  WitnessPair out = make_pair(sum, make_square(sum, prefix.u + pair.first.u, prefix.v + pair.first.v),
                              make_square(sum, prefix.u + pair.second.u, prefix.v + pair.second.v), bound,
                              pair.delta + delta_prime);
  out.depth = pair.depth;
  out.method = "concat-left";
  return out;
}

WitnessPair concat_right(const SumSystem& sum, const WitnessPair& pair, const CylinderSquare& suffix,
                         const Real& delta_prime) {
  require_prefix_square(sum, suffix, delta_prime);
  Real bound = concat_right_bound(pair.epsilon, pair.delta, delta_prime,
                                  exact_ratio_real(sum.lambda_system(), suffix.u));
  WitnessPair out = make_pair(sum, make_square(sum, pair.first.u + suffix.u, pair.first.v + suffix.v),
                              make_square(sum, pair.second.u + suffix.u, pair.second.v + suffix.v), bound,
                              pair.delta + delta_prime);
  out.depth = pair.depth;
  out.method = "concat-right";
  return out;
}

WitnessPair transitivity_bound(const SumSystem& sum, const WitnessPair& p1, const WitnessPair& p2) {
  const CylinderSquare* a = nullptr;
  const CylinderSquare* c = nullptr;
  const CylinderSquare* left[2] = {&p1.first, &p1.second};
  const CylinderSquare* right[2] = {&p2.first, &p2.second};
  for (int i = 0; i < 2 && !a; ++i)
    for (int j = 0; j < 2 && !a; ++j)
      if (left[i]->same_words(*right[j])) {
        a = left[1 - i];
        c = right[1 - j];
      }
  if (!a) throw Error(ErrorCode::no_shared_square, "the two pairs have no square in common");
  Real eps = max(p1.epsilon, p2.epsilon);
  if (eps >= log(Real(2))) throw Error(ErrorCode::epsilon_too_large, "transitivity needs eps < log 2");
  WitnessPair out = make_pair(sum, *a, *c, 4 * eps, max(p1.delta, p2.delta));
  out.depth = std::max(p1.depth, p2.depth);
  out.method = "transitivity";
  return out;
}

// ---------------------------------------------------------------------------
// Padding

Padding find_padding(const SumSystem& sum, const Word& s, const Word& t, double delta, double r, int max_length) {
  if (!(delta > 0)) throw Error(ErrorCode::domain_error, "delta must be positive");
  if (!(r > 0 && r < 1)) throw Error(ErrorCode::domain_error, "r must lie in (0,1)");
  const auto& ls = sum.lambda_system();
  const auto& gs = sum.gamma_system();
  WordStats a = word_stats(ls, s), b = word_stats(gs, t);
  double log_pure = a.log_ratio - b.log_ratio;
  if (std::fabs(log_pure) > -std::log(r) * (1 + 1e-12))
    throw Error(ErrorCode::domain_error, "lambda_s / gamma_t lies outside [r, 1/r]");

  struct Node {
    double x;
    int parity;
    int parent;
    bool lambda_side;
    Word::Digit digit;
    int la, lb;
  };
  std::vector<Node> nodes;
  nodes.push_back({sum.log_size_factor() + log_pure, to_int(a.orientation * b.orientation), -1, false, 0, 0, 0});

  double max_step = 0;
  for (Word::Digit d = 1; d <= ls.size(); ++d) max_step = std::max(max_step, -ls.log_ratio(d));
  for (Word::Digit d = 1; d <= gs.size(); ++d) max_step = std::max(max_step, -gs.log_ratio(d));
  const double bound = std::max(std::fabs(nodes[0].x), max_step) + delta;
  const double cell = delta / 4;
  std::set<std::pair<long long, int>> seen;
  seen.insert({static_cast<long long>(std::floor(nodes[0].x / cell)), nodes[0].parity});

  auto rebuild = [&](int idx) {
    Padding p;
    std::vector<Word::Digit> alpha, beta;
    for (int i = idx; nodes[i].parent >= 0; i = nodes[i].parent)
      (nodes[i].lambda_side ? alpha : beta).push_back(nodes[i].digit);
    std::reverse(alpha.begin(), alpha.end());
    std::reverse(beta.begin(), beta.end());
    p.alpha = Word(std::move(alpha));
    p.beta = Word(std::move(beta));
    p.k_used = static_cast<int>(std::max(p.alpha.size(), p.beta.size()));
    return p;
  };
  auto accept = [&](int idx) {
    const Node& n = nodes[idx];
    if (n.parity != 1 || !(std::fabs(n.x) < delta)) return false;
    Padding p = rebuild(idx);
    return is_delta_square_exact(sum, s + p.alpha, t + p.beta, Real(delta));
  };

  constexpr std::size_t kMaxStates = 2'000'000;
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (accept(static_cast<int>(head))) return rebuild(static_cast<int>(head));
    Node cur = nodes[head];
    auto push = [&](bool lambda_side, Word::Digit d) {
      Node next = cur;
      next.parent = static_cast<int>(head);
      next.lambda_side = lambda_side;
      next.digit = d;
      if (lambda_side) {
        if (++next.la > max_length) return;
        next.x += ls.log_ratio(d);
        next.parity *= to_int(ls.orientation(d));
      } else {
        if (++next.lb > max_length) return;
        next.x -= gs.log_ratio(d);
        next.parity *= to_int(gs.orientation(d));
      }
      if (std::fabs(next.x) > bound) return;
      auto key = std::make_pair(static_cast<long long>(std::floor(next.x / cell)), next.parity);
      // A state that already satisfies the goal is always kept so the exact check sees it.
      bool goal = next.parity == 1 && std::fabs(next.x) < delta;
      if (!seen.insert(key).second && !goal) return;
      nodes.push_back(next);
    };
    for (Word::Digit d = 1; d <= ls.size(); ++d) push(true, d);
    for (Word::Digit d = 1; d <= gs.size(); ++d) push(false, d);
    if (nodes.size() > kMaxStates) break;
  }
  throw Error(ErrorCode::search_exhausted, "no padding words within the length cap");
}

// ---------------------------------------------------------------------------
// Amplification

namespace {

std::vector<CylinderSquare> amplify_rec(const SumSystem& sum, double eps, double delta, int count,
                                        const SearchOptions& options) {
  if (count == 2) {
    SearchOptions opt = options;
    opt.balanced_orientation = true;
    double e = std::min(eps, delta);
    opt.delta = e;
    SearchOutcome found = find_witness(sum, e, opt);
    if (!found.witness)
      throw Error(ErrorCode::witness_unavailable,
                  "no witness at eps = " + format_double(e) + " above the scale floor");
    return {found.witness->first, found.witness->second};
  }
  const double eps1 = eps / 8, delta1 = delta / 2;
  std::vector<CylinderSquare> inner = amplify_rec(sum, eps1, delta1, count / 2, options);
  double max_inverse = 0;
  for (const auto& sq : inner) max_inverse = std::max(max_inverse, 1 / sq.lambda_u);

  double eps2 = eps1, delta2 = delta / 4;
  auto choice1 = [&] {
    return eps1 * std::exp(delta2) + 2 * std::expm1(delta2) * std::exp(delta2 + delta1 + eps1) * max_inverse;
  };
  auto choice2 = [&] {
    return std::exp(delta1) * max_inverse * std::exp(eps1) *
           (eps2 + 2 * std::exp(eps2 + delta2) * std::expm1(eps2));
  };
  for (int i = 0; i < 200 && (choice1() >= eps / 4 || choice2() >= eps / 4); ++i) {
    if (choice1() >= eps / 4) delta2 /= 2;
    if (choice2() >= eps / 4) eps2 /= 2;
  }
  std::vector<CylinderSquare> outer = amplify_rec(sum, eps2, delta2, 2, options);

  std::vector<CylinderSquare> out;
  for (const auto& st : outer)
    for (const auto& uv : inner) out.push_back(make_square(sum, st.u + uv.u, st.v + uv.v));
  return out;
}

}  // namespace

std::vector<CylinderSquare> amplify(const SumSystem& sum, double eps, double delta, int n_target,
                                    const SearchOptions& options) {
  if (n_target < 2) throw Error(ErrorCode::domain_error, "n_target must be at least 2");
  if (!(eps > 0 && delta > 0)) throw Error(ErrorCode::domain_error, "eps and delta must be positive");
  // Closeness at a smaller eps implies closeness at eps; the chaining step needs eps/4 < log 2.
  const double eps_work = std::min(eps, 2.0);
  int count = 2;
  while (count < n_target) count *= 2;
  std::vector<CylinderSquare> squares = amplify_rec(sum, eps_work, delta, count, options);
  squares.resize(static_cast<std::size_t>(n_target));

  const Real eps_r(eps), delta_r(delta);
  for (std::size_t i = 0; i < squares.size(); ++i) {
    if (!is_delta_square_exact(sum, squares[i].u, squares[i].v, delta_r))
      throw Error(ErrorCode::witness_unavailable, "constructed square failed the delta-square check");
    for (std::size_t j = i + 1; j < squares.size(); ++j) {
      if (squares[i].same_words(squares[j]) || !exact_closeness(sum, squares[i], squares[j], eps_r).close())
        throw Error(ErrorCode::witness_unavailable, "constructed squares failed exact verification");
    }
  }
  return squares;
}

}  // namespace cantorsum
