#include "cantorsum/square_search.hpp"
#include "instances.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cantorsum;

namespace {

AffineCantorSystem middle(const Rational& r) { return validate_system({make_map(1, r, 0), make_map(1, r, 1 - r)}); }

SumSystem middle_pair(const Rational& a, const Rational& b, const Rational& eta = Rational(1)) {
  return SumSystem(middle(a), middle(b), eta);
}

/// Independent acceptance of a reported witness.
void check_witness(const SumSystem& sum, const WitnessPair& w) {
  auto p = oracle::pairing(sum);
  auto a = p.square(w.first.u, w.first.v), b = p.square(w.second.u, w.second.v);
  CHECK(w.verified_exact);
  CHECK(oracle::witness(p, a, b, w.epsilon, w.delta) == 1);
}

int error_code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return static_cast<int>(e.code());
  }
  return -1;
}

}  // namespace

TEST_CASE("is_delta_square examples") {
  auto s = middle_pair(Rational(1, 3), Rational(1, 5));
  auto sq = make_square(s, Word::parse("11"), Word::parse("2"));
  CHECK_FALSE(is_delta_square(s, sq, 0.5));
  CHECK(is_delta_square(s, sq, 0.6));
  CHECK_FALSE(is_delta_square_exact(s, sq.u, sq.v, Real(0.5)));
  CHECK(is_delta_square_exact(s, sq.u, sq.v, Real(0.6)));

  auto m3 = middle_pair(Rational(1, 3), Rational(1, 3));
  auto eq = make_square(m3, Word::parse("12"), Word::parse("21"));
  CHECK(is_delta_square(m3, eq, 1e-12));
  CHECK(is_delta_square_exact(m3, eq.u, eq.v, Real(1e-30)));

  auto qh = middle_pair(Rational(1, 4), Rational(1, 2));
  CHECK(is_delta_square_exact(qh, Word::parse("1"), Word::parse("22"), Real(1e-20)));
}

TEST_CASE("physical-size convention under eta") {
  auto s = middle_pair(Rational(1, 3), Rational(1, 3), Rational(3));
  // D_lambda * lambda_u = 1/3 against 3 * gamma_v = 1/3 for |v| = 2.
  CHECK(is_delta_square_exact(s, Word::parse("1"), Word::parse("11"), Real(1e-30)));
  CHECK_FALSE(is_delta_square_exact(s, Word::parse("1"), Word::parse("1"), Real(1.0)));
}

TEST_CASE("relative_closeness examples") {
  auto s = middle_pair(Rational(1, 3), Rational(1, 3));
  auto a = make_square(s, Word::parse("2"), Word::parse("1"));
  auto b = make_square(s, Word::parse("1"), Word::parse("2"));
  auto same = relative_closeness(s, a, a, 0.1);
  CHECK(same.close());
  CHECK(same.margin == doctest::Approx(1.0));
  CHECK(relative_closeness(s, a, b, 1e-6).close());
  CHECK(exact_closeness(s, a, b, Real(1e-40)).close());

  auto rev = validate_system({make_map(1, Rational(1, 3), 0), make_map(-1, Rational(1, 3), 1)});
  SumSystem r(rev, middle(Rational(1, 3)));
  auto ra = make_square(r, Word::parse("2"), Word::parse("1"));
  auto rb = make_square(r, Word::parse("1"), Word::parse("2"));
  auto v = exact_closeness(r, ra, rb, Real(0.5));
  CHECK_FALSE(v.orientation_ok);
  CHECK_FALSE(v.close());
}

TEST_CASE("exact and binary64 closeness agree away from boundaries") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    auto lm = oracle::random_unit_system(rng, 3, true);
    auto gm = oracle::random_unit_system(rng, 2, true);
    SumSystem s(validate_system(lm), validate_system(gm), Rational(static_cast<long>(rng() % 20 + 5), 10));
    auto p = oracle::pairing(s);
    auto us = oracle::words_above(p.lm, 0.05), vs = oracle::words_above(p.gm, 0.05);
    for (int k = 0; k < 50; ++k) {
      auto a = make_square(s, us[rng() % us.size()], vs[rng() % vs.size()]);
      auto b = make_square(s, us[rng() % us.size()], vs[rng() % vs.size()]);
      double eps = 0.05 + (rng() % 100) / 100.0;
      auto f = relative_closeness(s, a, b, eps);
      auto e = exact_closeness(s, a, b, Real(eps));
      int o = oracle::close(p, p.square(a.u, a.v), p.square(b.u, b.v), Real(eps));
      if (o >= 0) CHECK(e.close() == (o == 1));
      if (std::fabs(f.margin) > 1e-9) CHECK(f.endpoint_ok == e.endpoint_ok);
    }
  }
}

TEST_CASE("find_witness on the middle-third self-sum returns the swap pair") {
  auto s = middle_pair(Rational(1, 3), Rational(1, 3));
  SearchOptions opt;
  opt.scale_floor = 1e-4;
  auto out = find_witness(s, 0.1, opt);
  REQUIRE(out.witness);
  CHECK(out.witness->depth == 1);
  CHECK(out.witness->first.u == Word{1});
  CHECK(out.witness->first.v == Word{2});
  CHECK(out.witness->second.u == Word{2});
  CHECK(out.witness->second.v == Word{1});
  check_witness(s, *out.witness);
}

TEST_CASE("self-sums of random systems have a depth-one or depth-two swap witness") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    auto maps = oracle::random_unit_system(rng, 2 + static_cast<int>(rng() % 3), false);
    auto sys = validate_system(maps);
    SumSystem s(sys, sys);
    SearchOptions opt;
    opt.scale_floor = 1e-3;
    double eps = 0.05 + 0.95 * (rng() % 1000) / 1000.0;
    auto out = find_witness(s, eps, opt);
    REQUIRE(out.witness);
    check_witness(s, *out.witness);
    // (u, v) and (v, u) have equal endpoints whenever lambda_u = lambda_v.
    auto p = oracle::pairing(s);
    bool equal_first_two = maps[0].ratio == maps[1].ratio;
    if (equal_first_two) {
      CHECK(out.witness->depth <= 1);
      CHECK(oracle::witness(p, p.square(Word{2}, Word{1}), p.square(Word{1}, Word{2}), Real(eps), Real(eps)) == 1);
    } else {
      CHECK(oracle::witness(p, p.square(Word{1, 2}, Word{2, 1}), p.square(Word{2, 1}, Word{1, 2}), Real(eps),
                            Real(eps)) == 1);
    }
  }
}

TEST_CASE("region-Ic pair at eta 1.37 has no witness down to 20^-6") {
  auto s = middle_pair(Rational(1, 20), Rational(1, 20), Rational(137, 100));
  SearchOptions opt;
  opt.scale_floor = std::pow(20.0, -6);
  auto out = find_witness(s, 0.02, opt);
  CHECK_FALSE(out.witness);
  CHECK(out.depth_reached == 6);
}

TEST_CASE("find_witness agrees with exhaustive pair enumeration") {
  std::mt19937_64 rng(23);
  int found = 0, none = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto lm = oracle::random_unit_system(rng, 2 + static_cast<int>(rng() % 2), true);
    auto gm = oracle::random_unit_system(rng, 2, true);
    Rational eta(static_cast<long>(rng() % 30 + 5), 17);
    SumSystem s(validate_system(lm), validate_system(gm), eta);
    double eps = 0.02 + 0.3 * (rng() % 1000) / 1000.0;
    double floor = 0.004;
    int truth = oracle::brute_force_witness_exists(oracle::pairing(s), eps, floor);
    if (truth < 0) continue;
    SearchOptions opt;
    opt.scale_floor = floor;
    auto out = find_witness(s, eps, opt);
    CHECK(out.witness.has_value() == (truth == 1));
    if (out.witness) {
      check_witness(s, *out.witness);
      ++found;
    } else {
      ++none;
    }
  }
  CHECK(found > 5);
  CHECK(none > 5);
}

TEST_CASE("NotFound persists when the scale floor rises") {
  auto s = middle_pair(Rational(1, 20), Rational(1, 20), Rational(137, 100));
  SearchOptions opt;
  for (double f : {std::pow(20.0, -6), 1e-6, std::pow(20.0, -4), 1e-3, 0.02}) {
    opt.scale_floor = f;
    CHECK_FALSE(find_witness(s, 0.02, opt).witness);
  }
}

TEST_CASE("search results do not depend on the number of threads") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 8; ++trial) {
    auto lm = oracle::random_unit_system(rng, 3, true);
    auto gm = oracle::random_unit_system(rng, 3, true);
    SumSystem s(validate_system(lm), validate_system(gm), Rational(static_cast<long>(rng() % 30 + 5), 17));
    SearchOptions one, many;
    one.scale_floor = many.scale_floor = 1e-4;
    many.budget.threads = 8;
    auto a = find_witness(s, 0.03, one), b = find_witness(s, 0.03, many);
    CHECK(a.depth_reached == b.depth_reached);
    CHECK(a.squares_examined == b.squares_examined);
    REQUIRE(a.witness.has_value() == b.witness.has_value());
    if (a.witness) {
      CHECK(a.witness->first.same_words(b.witness->first));
      CHECK(a.witness->second.same_words(b.witness->second));
    }
  }
}

TEST_CASE("budget exhaustion is reported, not mistaken for NotFound") {
  auto s = middle_pair(Rational(1, 20), Rational(1, 20), Rational(137, 100));
  SearchOptions opt;
  opt.scale_floor = 1e-12;
  opt.budget.max_words = 1000;
  CHECK(error_code_of([&] { find_witness(s, 0.02, opt); }) == static_cast<int>(ErrorCode::budget_exceeded));
}

TEST_CASE("homogeneous_corner_witness examples") {
  CHECK(homogeneous_corner_witness(0.3, 0.3, 0.01) == std::pair{1, 1});
  CHECK(homogeneous_corner_witness(0.25, 0.5, 0.01) == std::pair{1, 2});
  CHECK(homogeneous_corner_witness(0.3, 0.25, 0.05) == std::pair{15, 13});
  CHECK(oracle::corner_pair(0.3, 0.25, 0.05) == std::pair{15, 13});
}

TEST_CASE("homogeneous_corner_witness matches brute force") {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> r(0.05, 0.45);
  for (int trial = 0; trial < 200; ++trial) {
    double lam = r(rng), gam = r(rng), eps = trial % 2 ? 0.1 : 0.5;
    auto got = homogeneous_corner_witness(lam, gam, eps);
    auto want = oracle::corner_pair(lam, gam, std::log1p(eps));
    if (want.first != 0) CHECK(got == want);
    CHECK(std::fabs(got.first * std::log(lam) - got.second * std::log(gam)) < std::log1p(eps));
  }
}

TEST_CASE("corner witnesses verify exactly") {
  for (auto [a, b] : {std::pair{Rational(3, 10), Rational(1, 4)}, {Rational(1, 4), Rational(1, 2)},
                      {Rational(2, 5), Rational(1, 7)}}) {
    auto s = middle_pair(a, b);
    for (double eps : {0.5, 0.1, 0.05}) {
      auto w = corner_witness(s, eps);
      REQUIRE(w);
      check_witness(s, *w);
      auto nm = homogeneous_corner_witness(to_double(a), to_double(b), eps);
      std::size_t n = std::max(w->first.u.size(), w->second.u.size());
      std::size_t m = std::max(w->first.v.size(), w->second.v.size());
      CHECK(n == static_cast<std::size_t>(nm.first));
      CHECK(m == static_cast<std::size_t>(nm.second));
    }
  }
  // Orientation-reversing systems are outside the corner family.
  auto rev = validate_system({make_map(1, Rational(1, 3), 0), make_map(-1, Rational(1, 3), 1)});
  CHECK_FALSE(corner_witness(SumSystem(rev, rev), 0.1));
}

TEST_CASE("concatenation bounds on generated instances") {
  instances::PairGenerator gen(26);
  for (int i = 0; i < 100; ++i) {
    WitnessPair p = gen.pair();
    auto [prefix, dp] = gen.affix();
    const SumSystem& s = gen.system();
    WitnessPair l = concat_left(s, prefix, p, dp);
    Real lam1 = Real(oracle::stats(oracle::raw_maps(s.lambda_system()), p.first.u).ratio);
    Real want = p.epsilon * exp(dp) + 2 * abs(exp(dp) - 1) * exp(dp + p.delta + p.epsilon) / lam1;
    CHECK(abs(l.epsilon - want) <= abs(want) * Real(1e-70));
    check_witness(s, l);

    WitnessPair r = concat_right(s, p, prefix, dp);
    Real lams = Real(oracle::stats(oracle::raw_maps(s.lambda_system()), prefix.u).ratio);
    Real want_r = exp(dp) / lams * (p.epsilon + 2 * exp(p.epsilon + p.delta) * abs(exp(p.epsilon) - 1));
    CHECK(abs(r.epsilon - want_r) <= abs(want_r) * Real(1e-70));
    check_witness(s, r);
  }
}

TEST_CASE("concatenation with a balanced prefix barely moves epsilon") {
  auto s = middle_pair(Rational(1, 3), Rational(1, 3));
  auto base = make_pair(s, make_square(s, Word{1}, Word{2}), make_square(s, Word{2}, Word{1}), Real(0.2), Real(0.2));
  REQUIRE(base.verified_exact);
  auto prefix = make_square(s, Word{2, 1}, Word{1, 1});
  auto l = concat_left(s, prefix, base, Real(1e-9));
  CHECK(l.verified_exact);
  CHECK(abs(l.epsilon - Real(0.2)) < Real(1e-6));
  auto r = concat_right(s, base, make_square(s, Word{}, Word{}), Real(1e-12));
  CHECK(r.verified_exact);
  CHECK(r.epsilon >= Real(0.2));
}

TEST_CASE("concatenation preconditions") {
  auto rev = validate_system({make_map(1, Rational(1, 3), 0), make_map(-1, Rational(1, 3), 1)});
  auto m3 = middle(Rational(1, 3));
  SumSystem s(rev, m3);
  auto base = make_pair(s, make_square(s, Word{1}, Word{1}), make_square(s, Word{1, 1}, Word{1, 1}), Real(0.5), Real(0.5));
  auto bad = make_square(s, Word{2}, Word{1});
  CHECK(error_code_of([&] { concat_left(s, bad, base, Real(0.1)); }) == static_cast<int>(ErrorCode::orientation_mismatch));
  CHECK(error_code_of([&] { concat_right(s, base, bad, Real(0.1)); }) == static_cast<int>(ErrorCode::orientation_mismatch));
}

TEST_CASE("transitivity on generated chains") {
  instances::PairGenerator gen(27);
  for (int i = 0; i < 100; ++i) {
    auto [p1, p2] = gen.chain();
    const SumSystem& s = gen.system();
    WitnessPair out = transitivity_bound(s, p1, p2);
    CHECK(out.epsilon == 4 * max(p1.epsilon, p2.epsilon));
    check_witness(s, out);
    auto p = oracle::pairing(s);
    auto a = p.square(out.first.u, out.first.v), c = p.square(out.second.u, out.second.v);
    Real two_eps = 2 * max(p1.epsilon, p2.epsilon);
    CHECK(abs(log(Real(a.lam / c.lam))) < two_eps);
    CHECK(abs(log(Real(a.gam / c.gam))) < two_eps);
  }
}

TEST_CASE("transitivity preconditions") {
  auto s = middle_pair(Rational(1, 3), Rational(1, 3));
  auto a = make_square(s, Word{1}, Word{2}), b = make_square(s, Word{2}, Word{1});
  auto c = make_square(s, Word{1, 2}, Word{2, 1}), d = make_square(s, Word{2, 1}, Word{1, 2});
  auto p = make_pair(s, a, b, Real(0.8), Real(0.8));
  CHECK(error_code_of([&] { transitivity_bound(s, p, p); }) == static_cast<int>(ErrorCode::epsilon_too_large));
  auto q1 = make_pair(s, a, b, Real(0.1), Real(0.1)), q2 = make_pair(s, c, d, Real(0.1), Real(0.1));
  CHECK(error_code_of([&] { transitivity_bound(s, q1, q2); }) == static_cast<int>(ErrorCode::no_shared_square));
}

TEST_CASE("find_padding examples") {
  auto m3 = middle_pair(Rational(1, 3), Rational(1, 3));
  auto none = find_padding(m3, Word{1, 2}, Word{2, 2}, 0.1, 0.5);
  CHECK(none.alpha.empty());
  CHECK(none.beta.empty());
  CHECK(none.k_used == 0);

  auto s = middle_pair(Rational(1, 3), Rational(1, 5));
  auto pad = find_padding(s, Word{1}, Word{1}, 0.1, 0.3);
  Word u = Word{1} + pad.alpha, v = Word{1} + pad.beta;
  CHECK(is_delta_square_exact(s, u, v, Real(0.1)));
  // Among all digit counts a, b <= 40 the smallest total length that balances.
  int best = 1000;
  for (int a = 0; a <= 40; ++a)
    for (int b = 0; b <= 40; ++b)
      if (std::fabs((1 + a) * std::log(3.0) - (1 + b) * std::log(5.0)) < 0.1) best = std::min(best, a + b);
  CHECK(static_cast<int>(pad.alpha.size() + pad.beta.size()) == best);
}

TEST_CASE("find_padding repairs orientation parity") {
  auto rev = validate_system({make_map(1, Rational(1, 3), 0), make_map(-1, Rational(1, 3), 1)});
  auto m3 = middle(Rational(1, 3));
  SumSystem s(rev, m3);
  Word sw{2}, tw{1};
  auto pad = find_padding(s, sw, tw, 0.05, 0.3);
  auto a = exact_word_stats(s.lambda_system(), sw + pad.alpha);
  auto b = exact_word_stats(s.gamma_system(), tw + pad.beta);
  CHECK(a.orientation == b.orientation);
  CHECK(is_delta_square_exact(s, sw + pad.alpha, tw + pad.beta, Real(0.05)));
}

TEST_CASE("find_padding on random systems") {
  std::mt19937_64 rng(28);
  for (int trial = 0; trial < 100; ++trial) {
    auto lm = oracle::random_unit_system(rng, 3, true);
    auto gm = oracle::random_unit_system(rng, 2, true);
    SumSystem s(validate_system(lm), validate_system(gm));
    auto p = oracle::pairing(s);
    Word sw{static_cast<Word::Digit>(1 + rng() % 3)}, tw{static_cast<Word::Digit>(1 + rng() % 2)};
    double delta = 0.02 + 0.2 * (rng() % 100) / 100.0;
    auto pad = find_padding(s, sw, tw, delta, s.r_min());
    auto a = p.square(sw + pad.alpha, tw + pad.beta);
    CHECK(a.ol == a.og);
    CHECK(oracle::delta_square(p, a, Real(delta)) == 1);
    CHECK(pad.k_used <= 64);
  }
}

TEST_CASE("close 1-squares plus padding give close small squares") {
  // Search with 1-squares, pad the first square, append the padding to both.
  auto s = middle_pair(Rational(1, 3), Rational(1, 4));
  const double eps0 = 0.3;
  bool done = false;
  for (double eps = eps0 / 4.5; eps > 1e-4 && !done; eps /= 2) {
    SearchOptions opt;
    opt.scale_floor = 1e-6;
    opt.delta = 1.0;
    auto out = find_witness(s, eps, opt);
    REQUIRE(out.witness);
    const WitnessPair& w = *out.witness;
    CHECK(w.delta == Real(1.0));
    auto pad = find_padding(s, w.first.u, w.first.v, eps0 / 2, 0.3);
    auto suffix = make_square(s, pad.alpha, pad.beta);
    Real dp = Real(std::fabs(suffix.log_lambda - suffix.log_gamma) + 1e-9);
    if (!(suffix.o_lambda == suffix.o_gamma)) continue;
    WitnessPair padded = concat_right(s, w, suffix, dp);
    CHECK(padded.verified_exact);
    if (padded.epsilon >= Real(eps0)) continue;
    auto small = make_pair(s, padded.first, padded.second, Real(eps0), Real(eps0));
    CHECK(small.verified_exact);
    check_witness(s, small);
    done = true;
  }
  CHECK(done);
}

TEST_CASE("amplify base case and output shape") {
  auto s = middle_pair(Rational(1, 3), Rational(1, 3));
  SearchOptions opt;
  opt.scale_floor = 1e-6;
  auto two = amplify(s, 0.3, 0.3, 2, opt);
  REQUIRE(two.size() == 2);
  auto p = oracle::pairing(s);
  CHECK(oracle::witness(p, p.square(two[0].u, two[0].v), p.square(two[1].u, two[1].v), Real(0.3), Real(0.3)) == 1);

  auto four = amplify(s, 0.5, 0.5, 4, opt);
  REQUIRE(four.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(four[i].o_lambda == four[i].o_gamma);
    for (std::size_t j = i + 1; j < 4; ++j) {
      CHECK_FALSE(four[i].same_words(four[j]));
      CHECK(oracle::witness(p, p.square(four[i].u, four[i].v), p.square(four[j].u, four[j].v), Real(0.5), Real(0.5)) ==
            1);
    }
  }
  // The corner family of the self-sum gives four squares of the same shape.
  for (const auto& sq : four) CHECK(sq.u.size() == sq.v.size());
}

TEST_CASE("verify_witness rejects tampered pairs") {
  auto s = middle_pair(Rational(1, 3), Rational(1, 3));
  auto w = make_pair(s, make_square(s, Word{1}, Word{2}), make_square(s, Word{2}, Word{1}), Real(0.1), Real(0.1));
  CHECK(w.verified_exact);
  WitnessPair same = w;
  same.second = same.first;
  CHECK_FALSE(verify_witness(s, same));
  WitnessPair far = w;
  far.second = make_square(s, Word{2, 2}, Word{1});
  CHECK_FALSE(verify_witness(s, far));
}
