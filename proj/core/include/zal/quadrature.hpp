#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "zal/errors.hpp"

namespace zal {

// Gauss-Legendre rule on [-1, 1]. Nodes are Newton-refined roots of P_n,
// computed once per order and cached by the caller (they are cheap anyway).
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n);

    template <class F>
    double integrate(F&& f, double a, double b) const {
        double mid = 0.5 * (a + b);
        double half = 0.5 * (b - a);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * f(mid + half * nodes[i]);
        return acc * half;
    }
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;   // accumulated error estimate
    int evaluations = 0;
};

// Adaptive bisection with a fixed 15-point Gauss-Legendre rule per panel;
// the error estimate per panel is |whole - (left + right)|.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, int max_depth = 48);

} // namespace zal
