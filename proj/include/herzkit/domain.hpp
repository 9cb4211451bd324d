#pragma once

#include <cmath>
#include <optional>
#include <variant>

#include "herzkit/common.hpp"

namespace herzkit {

// Region the norms are restricted to. The built-in shapes all satisfy the
// cone condition; the flag is carried as metadata for the embedding
// experiments, which require it for the Sobolev-type statements.
struct FullSpace {};

struct Ball {
    Point center;
    double radius = 1.0;
};

// Union of dyadic shells C_k for k_min <= k <= k_max.
struct AnnulusRange {
    int k_min = 0;
    int k_max = 0;
};

struct Cube {
    Point corner;  // lowest-coordinate vertex
    double side = 1.0;
};

struct DomainSpec {
    std::variant<FullSpace, Ball, AnnulusRange, Cube> shape = FullSpace{};
    bool cone_condition = true;

    static DomainSpec full_space() { return DomainSpec{}; }
    static DomainSpec ball(Point center, double radius) {
        if (!(radius > 0.0)) throw invalid_input("ball radius must be positive");
        return DomainSpec{Ball{std::move(center), radius}};
    }
    static DomainSpec annulus_range(int k_min, int k_max) {
        if (k_min > k_max) throw invalid_input("annulus range requires k_min <= k_max");
        return DomainSpec{AnnulusRange{k_min, k_max}};
    }
    static DomainSpec cube(Point corner, double side) {
        if (!(side > 0.0)) throw invalid_input("cube side must be positive");
        return DomainSpec{Cube{std::move(corner), side}};
    }

    bool is_full_space() const { return std::holds_alternative<FullSpace>(shape); }

    bool contains_origin() const {
        if (is_full_space()) return true;
        if (auto* b = std::get_if<Ball>(&shape)) return euclid_norm(b->center) < b->radius;
        if (std::holds_alternative<AnnulusRange>(shape)) return false;
        const auto& c = std::get<Cube>(shape);
        for (double v : c.corner)
            if (!(v < 0.0 && 0.0 < v + c.side)) return false;
        return true;
    }

    // Radially symmetric about the origin (enables the 1-D reduction).
    bool is_radial() const {
        if (is_full_space()) return true;
        if (auto* b = std::get_if<Ball>(&shape)) {
            for (double v : b->center)
                if (v != 0.0) return false;
            return true;
        }
        return std::holds_alternative<AnnulusRange>(shape);
    }

    // Radial cross-section [r_lo, r_hi) for radial domains.
    std::pair<double, double> radial_interval() const {
        if (is_full_space()) return {0.0, std::numeric_limits<double>::infinity()};
        if (auto* b = std::get_if<Ball>(&shape)) return {0.0, b->radius};
        if (auto* a = std::get_if<AnnulusRange>(&shape))
            return {pow2i(a->k_min - 1), pow2i(a->k_max)};
        throw invalid_input("domain has no radial cross-section");
    }

    bool contains(const Point& x) const {
        if (is_full_space()) return true;
        if (auto* b = std::get_if<Ball>(&shape)) return dist(x, b->center) < b->radius;
        if (auto* a = std::get_if<AnnulusRange>(&shape)) {
            const double r = euclid_norm(x);
            return r >= pow2i(a->k_min - 1) && r < pow2i(a->k_max);
        }
        const auto& c = std::get<Cube>(shape);
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!(x[i] >= c.corner[i] && x[i] < c.corner[i] + c.side)) return false;
        return true;
    }
};

}  // namespace herzkit
