#include <doctest.h>

#include <cmath>
#include <random>

#include "herzkit/operators.hpp"
#include "oracles.hpp"

using namespace herzkit;

namespace {

const DomainSpec full = DomainSpec::full_space();

FunctionSpec unit_plateau(int n, double amp = 1.0) {
    return FunctionSpec::plateau(n, 0.0, 1.0, amp);
}

Point random_point(std::mt19937_64& rng, int n, double radius) {
    std::uniform_real_distribution<double> u(-radius, radius);
    Point x(static_cast<std::size_t>(n));
    for (auto& v : x) v = u(rng);
    return x;
}

}  // namespace

TEST_CASE("mollifier kernel integrates to one") {
    for (int n : {1, 2, 3}) {
        const MollifierKernel kernel(n, 0.5);
        auto g = [&](double rho) { return kernel.profile(rho) * std::pow(rho, n - 1); };
        const double mass = sphere_area(n) * adaptive_integrate(g, 0.0, 1.0, 1e-14, 40);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(kernel.profile(1.0) == 0.0);
        CHECK(kernel.profile(0.5) > 0.0);
    }
}

TEST_CASE("mollification reproduces constants on plateaus") {
    const auto f = FunctionSpec::plateau(2, 0.0, 2.0, 3.0);
    const double v = mollify(f, 0.25, {0.5, 0.0});
    CHECK(v == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("mollification leaves linear functions fixed") {
    SampledGrid grid;
    grid.dim = 2;
    grid.bbox_lo = {-1.0, -1.0};
    grid.spacing = 0.25;
    grid.counts = {9, 9};
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) grid.values.push_back(-1.0 + 0.25 * i);
    const auto f = FunctionSpec::grid(grid);
    const double v = mollify(f, 0.3, {0.1, -0.2});
    CHECK(v == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("pointwise mollification converges and matches a reference sweep") {
    const auto f = FunctionSpec::bump({0.0, 0.0}, 1.0);
    const Point x{0.3, 0.0};
    const double fx = evaluate(f, x);
    const MollifierKernel ref_kernel(2, 1.0);
    double prev = 1e300;
    for (int j = 2; j <= 6; ++j) {
        const double eps = std::ldexp(1.0, -j);
        const double v = mollify(f, eps, x);
        const double reference = oracle::reference_convolution(
            [&](const Point& y) { return evaluate(f, y); },
            [&](double rho) { return ref_kernel.profile(rho); }, eps, x, 48);
        CHECK(v == doctest::Approx(reference).epsilon(2e-3));
        const double err = std::fabs(v - fx);
        CHECK(err < prev * 1.05);
        prev = err;
    }
    CHECK(prev < 1e-4);
}

TEST_CASE("mollification error norm decreases with eps") {
    const auto f = FunctionSpec::bump({0.0, 0.0}, 1.0);
    const HerzParams hp{0.0, Exponent(2.0), Exponent(2.0), 2};
    double prev = 1e300;
    for (int j = 3; j <= 6; ++j) {
        const auto r = mollify_error_norm(f, std::ldexp(1.0, -j), hp, full);
        CHECK(r.value < prev);
        prev = r.value;
    }
}

TEST_CASE("maximal function of the unit plateau at the center") {
    const auto f = unit_plateau(2);
    const double m = maximal(f, {0.0, 0.0});
    const double sweep = oracle::maximal_sweep([&](const Point& y) { return evaluate(f, y); },
                                               {0.0, 0.0}, 2.0, 6, 24);
    CHECK(m == doctest::Approx(1.0).epsilon(0.02));
    CHECK(m >= sweep * 0.98);
}

TEST_CASE("maximal function dominates the function at interior points") {
    const auto f = FunctionSpec::bump({0.0, 0.0}, 1.0);
    std::mt19937_64 rng(67);
    for (int it = 0; it < 30; ++it) {
        const Point x = random_point(rng, 2, 0.9);
        CHECK(maximal(f, x) >= evaluate(f, x) * (1.0 - 0.02) - 1e-9);
    }
}

TEST_CASE("maximal function commutes with dyadic dilation") {
    const auto f = FunctionSpec::bump({0.4, 0.0}, 1.0);
    std::mt19937_64 rng(71);
    for (int m : {-2, 1}) {
        const auto fm = dilate_dyadic(f, m);
        for (int it = 0; it < 10; ++it) {
            const Point x = random_point(rng, 2, 1.5);
            Point scaled = x;
            for (auto& v : scaled) v *= pow2i(m);
            CHECK(maximal(fm, x) == doctest::Approx(maximal(f, scaled)).epsilon(1e-10));
        }
    }
}

TEST_CASE("maximal function is sublinear") {
    const auto f = FunctionSpec::bump({0.3, 0.0}, 1.0);
    const auto g = FunctionSpec::gaussian({-0.2, 0.1}, 0.7);
    const auto sum = FunctionSpec::sum({f, g});
    std::mt19937_64 rng(73);
    for (int it = 0; it < 20; ++it) {
        const Point x = random_point(rng, 2, 1.5);
        CHECK(maximal(sum, x) <= maximal(f, x) + maximal(g, x) + 1e-9);
    }
}

TEST_CASE("fractional maximal basics") {
    const auto f = FunctionSpec::bump({0.0, 0.0}, 1.0);
    const Point x{0.2, 0.1};
    CHECK(frac_maximal(f, 1.0, x) == maximal(f, x));

    const auto plat = FunctionSpec::plateau(2, 0.0, 4.0, 2.0);
    for (double t : {0.5, 1.0, 2.0, 3.0})
        CHECK(frac_maximal(plat, t, {0.5, 0.5}) == doctest::Approx(2.0).epsilon(1e-9));

    // power-mean ordering M_t >= M_s for t >= s >= 1
    std::mt19937_64 rng(79);
    for (int it = 0; it < 25; ++it) {
        const Point y = random_point(rng, 2, 1.2);
        const double m1 = frac_maximal(f, 1.0, y);
        const double m2 = frac_maximal(f, 2.0, y);
        const double m3 = frac_maximal(f, 3.0, y);
        CHECK(m2 >= m1 * (1.0 - 1e-9));
        CHECK(m3 >= m2 * (1.0 - 1e-9));
    }
    CHECK_THROWS_AS(frac_maximal(f, 0.0, x), invalid_input);
}

TEST_CASE("riesz potential of the unit-ball plateau at the center") {
    // integral of |y|^{lambda - n} over the unit ball = omega_{n-1} / lambda
    const double v2 = riesz(unit_plateau(2), 1.0, {0.0, 0.0});
    CHECK(v2 == doctest::Approx(2.0 * oracle::kPi).epsilon(1e-3));
    const double v3 = riesz(unit_plateau(3), 1.5, {0.0, 0.0, 0.0});
    CHECK(v3 == doctest::Approx(4.0 * oracle::kPi / 1.5).epsilon(1e-3));
    const double v1 = riesz(unit_plateau(1), 0.5, {0.0});
    CHECK(v1 == doctest::Approx(2.0 / 0.5).epsilon(1e-3));
}

TEST_CASE("riesz potential is nonnegative and translation covariant") {
    std::mt19937_64 rng(83);
    const double lambda = 1.2;
    for (int it = 0; it < 8; ++it) {
        const Point h = random_point(rng, 2, 0.8);
        const Point x = random_point(rng, 2, 1.5);
        const auto f0 = FunctionSpec::bump({0.0, 0.0}, 1.0);
        const auto fh = FunctionSpec::bump(h, 1.0);  // f0 translated by h
        const double direct = riesz(fh, lambda, x);
        Point shifted = x;
        for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] - h[i];
        const double moved = riesz(f0, lambda, shifted);
        CHECK(direct >= 0.0);
        CHECK(direct == doctest::Approx(moved).epsilon(1e-6));
    }
}

TEST_CASE("riesz potential dilation bookkeeping") {
    // I_lambda(f(2^m .))(x) = 2^{-m lambda} (I_lambda f)(2^m x)
    const auto f = FunctionSpec::bump({0.2, 0.0}, 1.0);
    const double lambda = 1.0;
    std::mt19937_64 rng(89);
    for (int m : {-1, 1, 2}) {
        const auto fm = dilate_dyadic(f, m);
        for (int it = 0; it < 5; ++it) {
            const Point x = random_point(rng, 2, 1.0);
            Point scaled = x;
            for (auto& v : scaled) v *= pow2i(m);
            const double lhs = riesz(fm, lambda, x);
            const double rhs = exp2d(-m * lambda) * riesz(f, lambda, scaled);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4));
        }
    }
}

TEST_CASE("riesz rejects non-decaying tails and bad orders") {
    const auto f = unit_plateau(2);
    CHECK_THROWS_AS(riesz(f, 0.0, {0.0, 0.0}), invalid_input);
    CHECK_THROWS_AS(riesz(f, 2.0, {0.0, 0.0}), invalid_input);
}

TEST_CASE("dyadic projection basics") {
    const Cube region{{-1.0, -1.0}, 2.0};

    // constants project to themselves
    const auto c = FunctionSpec::plateau(2, 0.0, 8.0, 2.5);
    const auto flat = dyadic_project(c, 2, region);
    for (double v : flat.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));

    // a linear profile on a single cube averages to its midpoint value
    SampledGrid lin;
    lin.dim = 2;
    lin.bbox_lo = {0.0, 0.0};
    lin.spacing = 1.0;
    lin.counts = {2, 2};
    lin.values = {0.0, 0.0, 1.0, 1.0};  // f(x) = x1
    const auto fl = FunctionSpec::grid(lin);
    const auto single = dyadic_project(fl, 0, Cube{{0.0, 0.0}, 1.0});
    REQUIRE(single.values.size() == 1);
    CHECK(single.values[0] == doctest::Approx(0.5).epsilon(1e-9));

    CHECK_THROWS_AS(dyadic_project(c, 1, Cube{{0.3, 0.0}, 1.0}), invalid_input);
}

TEST_CASE("dyadic projection error decays like the mesh size") {
    const auto f = FunctionSpec::bump({0.0, 0.0}, 1.0);
    const Cube region{{-1.0, -1.0}, 2.0};
    std::vector<double> sup_err;
    for (int j : {2, 3, 4, 5}) {
        const auto grid = dyadic_project(f, j, region);
        const auto pf = FunctionSpec::grid(grid);
        double worst = 0.0;
        const int nn = 64;
        for (int i = 0; i < nn; ++i)
            for (int k = 0; k < nn; ++k) {
                const Point x{-1.0 + (i + 0.37) * 2.0 / nn, -1.0 + (k + 0.61) * 2.0 / nn};
                worst = std::max(worst, std::fabs(evaluate(f, x) - evaluate(pf, x)));
            }
        sup_err.push_back(worst);
    }
    for (std::size_t i = 0; i + 1 < sup_err.size(); ++i) {
        const double order = std::log2(sup_err[i] / sup_err[i + 1]);
        CHECK(order >= 0.9);
    }
}

TEST_CASE("dyadic projection is idempotent") {
    const auto f = FunctionSpec::bump({0.0, 0.0}, 1.0);
    const Cube region{{-1.0, -1.0}, 2.0};
    const auto once = dyadic_project(f, 3, region);
    const auto twice = dyadic_project(FunctionSpec::grid(once), 3, region);
    REQUIRE(once.values.size() == twice.values.size());
    for (std::size_t i = 0; i < once.values.size(); ++i)
        CHECK(once.values[i] == twice.values[i]);  // exact
}
