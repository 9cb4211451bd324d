// Timing harness comparing the serial reference path against the OpenMP
// kernels: annulus-mass assembly of a full norm, a mollification sample
// sweep, and a dyadic projection mesh.

#include <chrono>
#include <cstdio>

#include "herzkit/norms.hpp"
#include "herzkit/operators.hpp"
#include "herzkit/parallel.hpp"

using namespace herzkit;

namespace {

using clk = std::chrono::steady_clock;

double ms_since(clk::time_point t0) {
    return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

struct BenchCase {
    const char* name;
    double (*run)();
};

double bench_norm() {
    const auto f = FunctionSpec::gaussian({0.0, 0.0}, 1.0);
    TruncationPolicy t;
    t.tail_tol = 1e-14;
    const auto r = herz_norm(f, HerzParams{0.25, Exponent(2.0), Exponent(1.5), 2},
                             DomainSpec::full_space(), t);
    return r.value;
}

double bench_sobolev() {
    const auto f = FunctionSpec::gaussian({0.0, 0.0}, 1.0);
    const auto r = herz_sobolev_norm(
        f, SobolevParams{HerzParams{0.0, Exponent(2.0), Exponent(2.0), 2}, 1},
        DomainSpec::full_space());
    return r.value;
}

double bench_mollify() {
    const auto f = FunctionSpec::bump({0.0, 0.0}, 1.0);
    const auto r = mollify_error_norm(f, 1.0 / 64.0,
                                      HerzParams{0.0, Exponent(2.0), Exponent(2.0), 2},
                                      DomainSpec::full_space());
    return r.value;
}

double bench_project() {
    const auto f = FunctionSpec::bump({0.0, 0.0}, 1.0);
    const auto g = dyadic_project(f, 6, Cube{{-1.0, -1.0}, 2.0});
    return g.values.front();
}

}  // namespace

int main() {
    const BenchCase cases[] = {
        {"herz_norm gaussian n=2", [] { return bench_norm(); }},
        {"herz_sobolev m=1 n=2", [] { return bench_sobolev(); }},
        {"mollify_error eps=2^-6", [] { return bench_mollify(); }},
        {"dyadic_project j=6", [] { return bench_project(); }},
    };
    std::printf("%-28s %12s %12s %12s %8s\n", "kernel", "serial[ms]", "omp2[ms]", "omp4[ms]",
                "speedup");
    for (const auto& c : cases) {
        double t_serial = 0.0, t2 = 0.0, t4 = 0.0;
        double v_serial = 0.0, v_par = 0.0;
        set_worker_threads(1);
        {
            const auto t0 = clk::now();
            v_serial = c.run();
            t_serial = ms_since(t0);
        }
        set_worker_threads(2);
        {
            const auto t0 = clk::now();
            v_par = c.run();
            t2 = ms_since(t0);
        }
        set_worker_threads(4);
        {
            const auto t0 = clk::now();
            c.run();
            t4 = ms_since(t0);
        }
        set_worker_threads(1);
        const char* match = v_serial == v_par ? "" : "  [MISMATCH]";
        std::printf("%-28s %12.2f %12.2f %12.2f %7.2fx%s\n", c.name, t_serial, t2, t4,
                    t_serial / (t2 > 0.0 ? t2 : 1.0), match);
    }
    return 0;
}
