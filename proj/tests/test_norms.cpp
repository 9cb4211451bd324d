#include <doctest.h>

#include <cmath>
#include <random>

#include "herzkit/norms.hpp"
#include "herzkit/parallel.hpp"
#include "oracles.hpp"

using namespace herzkit;

namespace {

FunctionSpec powlog(int n, double a, double b, double lo, double hi, double amp = 1.0,
                    double edge = 0.0) {
    return FunctionSpec::radial_power_log(n, RadialPowerLog{a, b, lo, hi, amp, edge});
}

const DomainSpec full = DomainSpec::full_space();

HerzParams hp(double alpha, double p, double q, int n) {
    return HerzParams{alpha, exponent_from(p), exponent_from(q), n};
}

}  // namespace

TEST_CASE("single-annulus plateau has unit norm") {
    const auto f = FunctionSpec::plateau(1, 0.5, 1.0);
    for (double alpha : {-1.0, 0.0, 2.0}) {
        const auto r = herz_norm(f, hp(alpha, 2.0, 2.0, 1), full);
        CHECK(r.converged);
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("alpha = 0, p = q recovers the Lebesgue norm") {
    for (double s : {0.5, 1.0}) {
        const auto g = FunctionSpec::gaussian({0.0, 0.0}, s, 1.0);
        for (double p : {1.0, 2.0, 3.0}) {
            const auto r = herz_norm(g, hp(0.0, p, p, 2), full);
            CHECK(r.converged);
            CHECK(r.value ==
                  doctest::Approx(oracle::gaussian_lp_norm(1.0, s, 2, p)).epsilon(1e-8));
        }
    }
}

TEST_CASE("edge-regime log profile has square-summable terms") {
    // f = |x|^{-n} (|log|x||)^{-1} on (0, 1/2); at alpha = n - n/p the
    // weighted terms behave like 1/|k|: the sum converges but only as
    // slowly as sum k^{-2}, so the window runs to its cap and reports the
    // truncation honestly
    const auto f = powlog(2, -2.0, -1.0, 0.0, 0.5);
    const auto r = herz_norm(f, hp(1.0, 2.0, 2.0, 2), full);
    CHECK(r.status == NormStatus::truncated);
    CHECK(r.value > 0.0);
    for (const auto& [k, t] : r.terms) {
        if (k > -2 || t == 0.0) continue;
        const double scaled = t * std::fabs(static_cast<double>(k));
        CHECK(scaled > 0.3);  // t ~ c / |k| with c = O(1)
        CHECK(scaled < 6.0);
    }
}

TEST_CASE("geometric power profile matches the series oracle") {
    // a = -n on (0,1): alpha + n/p - n = 0.5 makes the terms 2^{0.5 k}
    const int n = 2;
    const double p = 2.0, a = -2.0, alpha = 1.5;
    const auto f = powlog(n, a, 0.0, 0.0, 1.0);
    for (double q : {1.0, 2.0, 4.0}) {
        const auto r = herz_norm(f, hp(alpha, p, q, n), full);
        CHECK(r.converged);
        const double c0 = oracle::rpl_annulus_mass(1.0, a, 0.0, 0.0, 1.0, n, p, 0);
        const double expect = c0 / std::pow(1.0 - std::exp2(-0.5 * q), 1.0 / q);
        CHECK(r.value == doctest::Approx(expect).epsilon(1e-8));
    }
    const auto rsup = herz_norm(f, hp(alpha, p, std::numeric_limits<double>::infinity(), n), full);
    CHECK(rsup.value ==
          doctest::Approx(oracle::rpl_annulus_mass(1.0, a, 0.0, 0.0, 1.0, n, p, 0)).epsilon(1e-8));
}

TEST_CASE("weighted norm with zero weight is the plain L^p norm") {
    const auto g = FunctionSpec::gaussian({0.0, 0.0, 0.0}, 1.0, 2.0);
    const double w = weighted_lp_norm(g, 0.0, Exponent(2.0), full);
    CHECK(w == doctest::Approx(oracle::gaussian_lp_norm(2.0, 1.0, 3, 2.0)).epsilon(1e-8));
}

TEST_CASE("weighted norm of power profiles folds the weight into the exponent") {
    // weight |x|^alpha against |x|^a gives the closed radial integral with
    // exponent (a + alpha) p + n
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> au(-1.5, 1.5);
    for (int it = 0; it < 10; ++it) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const double a = au(rng), alpha = au(rng), p = 1.0 + (rng() % 3);
        const auto f = powlog(n, a, 0.0, 0.25, 4.0);
        const double got = weighted_lp_norm(f, alpha, Exponent(p), full);
        const double integral =
            oracle::power_log_radial_integral((a + alpha) * p + n, 0.0, 0.25, 4.0);
        const double expect = std::pow(oracle::sphere_area(n) * integral, 1.0 / p);
        CHECK(got == doctest::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("weighted norm flags non-integrable origin singularities") {
    // (a + alpha) p + n <= 0 with support touching the origin
    const auto f = powlog(2, -1.5, 0.0, 0.0, 1.0);
    CHECK_THROWS_AS(weighted_lp_norm(f, -0.5, Exponent(2.0), full), quadrature_error);
    CHECK(weighted_lp_norm(f, 0.9, Exponent(2.0), full) > 0.0);
}

TEST_CASE("weighted-norm sandwich against the annulus norm") {
    // for p = q: 2^{-|alpha|} <= weighted / herz <= 2^{|alpha|}
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> au(-1.2, 1.2);
    const std::vector<FunctionSpec> fam{
        FunctionSpec::gaussian({0.0, 0.0}, 1.0),
        FunctionSpec::bump({0.7, 0.0}, 0.2),  // inside C_0
        powlog(2, -0.5, 0.0, 0.25, 4.0),
    };
    for (const auto& f : fam) {
        for (int it = 0; it < 4; ++it) {
            const double alpha = au(rng);
            const double p = 1.0 + (rng() % 2);
            const double w = weighted_lp_norm(f, alpha, Exponent(p), full);
            const double h = herz_norm(f, hp(alpha, p, p, 2), full).value;
            CHECK(w <= exp2d(std::fabs(alpha)) * h * (1.0 + 1e-8));
            CHECK(w >= exp2d(-std::fabs(alpha)) * h * (1.0 - 1e-8));
        }
    }
}

TEST_CASE("sobolev norm with m = 0 is the plain annulus norm") {
    const auto f = FunctionSpec::gaussian({0.0, 0.0}, 1.0);
    const auto plain = herz_norm(f, hp(0.5, 2.0, 2.0, 2), full);
    const auto sob = herz_sobolev_norm(f, SobolevParams{hp(0.5, 2.0, 2.0, 2), 0}, full);
    CHECK(sob.value == doctest::Approx(plain.value).epsilon(1e-12));
}

TEST_CASE("first-order sobolev norm of a gaussian matches the whole-space oracle") {
    const double s = 1.0;
    const auto f = FunctionSpec::gaussian({0.0, 0.0}, s, 1.0);
    const auto r = herz_sobolev_norm(f, SobolevParams{hp(0.0, 2.0, 2.0, 2), 1}, full);
    const double l2 = oracle::gaussian_lp_norm(1.0, s, 2, 2.0);
    const double g2 = oracle::gaussian_grad_l2_norm(1.0, s, 2);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::sqrt(l2 * l2 + g2 * g2)).epsilon(1e-6));
}

TEST_CASE("sobolev norm over a disjoint domain is zero") {
    const auto f = FunctionSpec::bump({0.0, 0.0}, 1.0);
    const auto r = herz_sobolev_norm(f, SobolevParams{hp(0.0, 2.0, 2.0, 2), 1},
                                     DomainSpec::ball({10.0, 0.0}, 1.0));
    CHECK(r.value == 0.0);
}

TEST_CASE("sobolev norm names missing derivatives") {
    const auto f = FunctionSpec::bump({0.0, 0.0}, 1.0);
    CHECK_THROWS_AS(herz_sobolev_norm(f, SobolevParams{hp(0.0, 2.0, 2.0, 2), 2}, full),
                    unsupported);
}

TEST_CASE("gradient norm of power profiles shifts the exponent") {
    // |grad f| = |a| |x|^{a-1} for f = |x|^a
    const double a = -0.5;
    const auto f = powlog(2, a, 0.0, 0.5, 4.0);
    const auto fg = powlog(2, a - 1.0, 0.0, 0.5, 4.0, std::fabs(a));
    const auto lhs = gradient_herz_norm(f, 0.3, Exponent(2.0), Exponent(2.0), full);
    const auto rhs = herz_norm(fg, hp(0.3, 2.0, 2.0, 2), full);
    CHECK(lhs.value == doctest::Approx(rhs.value).epsilon(1e-8));
}

TEST_CASE("gradient norm of a gaussian matches the moment oracle") {
    const auto f = FunctionSpec::gaussian({0.0, 0.0}, 1.0, 1.0);
    const auto r = gradient_herz_norm(f, 0.0, Exponent(2.0), Exponent(2.0), full);
    CHECK(r.value == doctest::Approx(oracle::gaussian_grad_l2_norm(1.0, 1.0, 2)).epsilon(1e-6));
}

TEST_CASE("flat plateaus contribute nothing to gradient norms") {
    const auto f = FunctionSpec::plateau(2, 0.25, 8.0);
    const auto r = gradient_herz_norm(f, 0.0, Exponent(2.0), Exponent(2.0), full);
    CHECK(r.value == doctest::Approx(0.0));
}

TEST_CASE("exact dyadic homogeneity of the annulus norm") {
    // ||f(2^m .)|| = 2^{-m (alpha + n/p)} ||f||
    const std::vector<FunctionSpec> fam{FunctionSpec::gaussian({0.0, 0.0}, 1.0),
                                        FunctionSpec::bump({0.4, 0.0}, 1.0),
                                        powlog(2, -0.6, 0.0, 0.25, 4.0, 1.0, 0.25)};
    for (const auto& f : fam) {
        const double alpha = 0.4, p = 2.0, q = 1.5;
        const double base = herz_norm(f, hp(alpha, p, q, 2), full).value;
        for (int m : {-2, 3}) {
            const double dil = herz_norm(dilate_dyadic(f, m), hp(alpha, p, q, 2), full).value;
            CHECK(dil == doctest::Approx(base * exp2d(-m * (alpha + 2.0 / p))).epsilon(1e-8));
        }
    }
}

TEST_CASE("triangle inequality on random pairs") {
    std::mt19937_64 rng(53);
    const std::vector<FunctionSpec> fam{FunctionSpec::gaussian({0.0, 0.0}, 0.8, 1.3),
                                        FunctionSpec::bump({0.2, 0.0}, 1.2, 0.7),
                                        powlog(2, 0.5, 0.0, 0.25, 2.0)};
    for (std::size_t i = 0; i < fam.size(); ++i)
        for (std::size_t j = i + 1; j < fam.size(); ++j) {
            const auto sum = FunctionSpec::sum({fam[i], fam[j]});
            const auto par = hp(0.3, 2.0, 1.5, 2);
            const double lhs = herz_norm(sum, par, full).value;
            const double a = herz_norm(fam[i], par, full).value;
            const double b = herz_norm(fam[j], par, full).value;
            CHECK(lhs <= (a + b) * (1.0 + 1e-7));
        }
}

TEST_CASE("annulus norms decrease in the outer exponent") {
    const std::vector<FunctionSpec> fam{FunctionSpec::gaussian({0.0, 0.0}, 1.0),
                                        powlog(2, -0.4, 0.0, 0.125, 8.0)};
    for (const auto& f : fam) {
        double prev = std::numeric_limits<double>::infinity();
        for (double q : {1.0, 1.5, 2.0, 4.0, std::numeric_limits<double>::infinity()}) {
            const double v = herz_norm(f, hp(0.2, 2.0, q, 2), full).value;
            CHECK(v <= prev * (1.0 + 1e-9));
            prev = v;
        }
    }
}

TEST_CASE("divergence is detected and reported with direction") {
    // f = |x|^{-n} near the origin: the L1 annulus masses are constant, so
    // the alpha = 0, q = 1 sum diverges at the lower edge
    const auto f = powlog(2, -2.0, 0.0, 0.0, 1.0);
    const auto r = herz_norm(f, hp(0.0, 1.0, 1.0, 2), full);
    CHECK_FALSE(r.converged);
    CHECK(r.status == NormStatus::diverging_low);
    CHECK(r.value > 0.0);  // partial value is reported

    // growing outer terms
    const auto g = FunctionSpec::gaussian({0.0, 0.0}, 1.0);
    const auto up = herz_norm(g, hp(-3.0, 2.0, 2.0, 2), full);
    CHECK_FALSE(up.converged);
    CHECK(up.status == NormStatus::diverging_low);
}

TEST_CASE("hard-cap exhaustion without a settled tail is flagged") {
    const auto g = FunctionSpec::gaussian({0.0, 0.0}, 1.0);
    TruncationPolicy tight;
    tight.tail_tol = 1e-14;
    tight.hard_cap = 8;  // the near-origin tail cannot settle in 8 annuli
    const auto r = herz_norm(g, hp(0.0, 2.0, 2.0, 2), full, tight);
    CHECK_FALSE(r.converged);
    CHECK(r.status == NormStatus::truncated);
}

TEST_CASE("hardy transform by backward recursion") {
    CHECK(hardy_transform({1.0, 0.0, 0.0}, 0.5) == std::vector<double>{1.0, 0.0, 0.0});
    const auto d = hardy_transform({0.0, 1.0, 0.0, 0.0}, 0.5);
    CHECK(d[0] == doctest::Approx(0.5));
    CHECK(d[1] == doctest::Approx(1.0));
    CHECK(d[2] == 0.0);

    // all-ones input: delta_k = (1 - a^{N-k}) / (1 - a)
    const double a = 0.3;
    const std::vector<double> ones(10, 1.0);
    const auto dd = hardy_transform(ones, a);
    for (std::size_t k = 0; k < ones.size(); ++k)
        CHECK(dd[k] ==
              doctest::Approx((1.0 - std::pow(a, 10.0 - k)) / (1.0 - a)).epsilon(1e-12));

    CHECK_THROWS_AS(hardy_transform(ones, 1.0), invalid_input);
    CHECK_THROWS_AS(hardy_transform(ones, 0.0), invalid_input);
}

TEST_CASE("hardy transform agrees with direct double summation") {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int it = 0; it < 30; ++it) {
        std::vector<double> eps(20);
        for (auto& e : eps) e = u(rng);
        const double a = 0.1 + 0.8 * u(rng) / 2.0;
        const auto fast = hardy_transform(eps, a);
        const auto slow = oracle::hardy_direct(eps, a);
        for (std::size_t k = 0; k < eps.size(); ++k)
            CHECK(fast[k] == doctest::Approx(slow[k]).epsilon(1e-12));
    }
}

TEST_CASE("hardy bound holds with the explicit constant") {
    // impulse input, q = 1: lhs = 1/(1-a) equals the bound exactly... the
    // transform of the impulse has lhs sum_{k<=0} a^{-k}; check the shape
    const HardyCheck imp = hardy_bound_check({1.0, 0.0, 0.0, 0.0}, 0.5, Exponent(1.0));
    CHECK(imp.ok);
    CHECK(imp.lhs == doctest::Approx(1.0));
    CHECK(imp.rhs_bound == doctest::Approx(2.0));

    // all-ones, q = inf: sup delta = (1 - a^N)/(1 - a) <= 1/(1-a)
    const HardyCheck flat = hardy_bound_check(std::vector<double>(32, 1.0), 0.5,
                                              Exponent::infinity());
    CHECK(flat.ok);
    CHECK(flat.lhs <= 2.0);
    CHECK(flat.rhs_bound == doctest::Approx(2.0));

    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int it = 0; it < 200; ++it) {
        std::vector<double> eps(1 + rng() % 40);
        for (auto& e : eps) e = u(rng) < 0.3 ? 0.0 : u(rng);
        const double a = 0.1 + 0.8 * u(rng);
        for (double q : {0.5, 1.0, 2.0, std::numeric_limits<double>::infinity()}) {
            const auto chk = hardy_bound_check(eps, a, exponent_from(q));
            CHECK(chk.ok);
        }
    }
}

TEST_CASE("serial and parallel norm evaluation agree bit for bit") {
    const auto f = FunctionSpec::gaussian({0.0, 0.0}, 1.0);
    const auto par = hp(0.25, 2.0, 1.5, 2);
    set_worker_threads(1);
    const auto serial = herz_norm(f, par, full);
    set_worker_threads(4);
    const auto parallel = herz_norm(f, par, full);
    set_worker_threads(1);
    CHECK(serial.value == parallel.value);  // exact equality
    REQUIRE(serial.terms.size() == parallel.terms.size());
    for (std::size_t i = 0; i < serial.terms.size(); ++i) {
        CHECK(serial.terms[i].first == parallel.terms[i].first);
        CHECK(serial.terms[i].second == parallel.terms[i].second);
    }
}

TEST_CASE("multi-index enumeration") {
    CHECK(multi_indices(2, 0) == std::vector<std::vector<int>>{{0, 0}});
    CHECK(multi_indices(2, 1).size() == 2);
    CHECK(multi_indices(3, 2).size() == 6);
    CHECK(multi_indices(1, 3) == std::vector<std::vector<int>>{{3}});
}
