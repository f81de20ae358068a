#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "force/image.hpp"

namespace force {

// Isotropic total variation with forward differences and Neumann boundary.
inline double tv_value(const Image& img) {
    img.validate();
    const int n = img.grid.n;
    double tv = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double gx = (j + 1 < n) ? img.at(i, j + 1) - img.at(i, j) : 0.0;
            const double gy = (i + 1 < n) ? img.at(i + 1, j) - img.at(i, j) : 0.0;
            tv += std::sqrt(gx * gx + gy * gy);
        }
    }
    return tv;
}

// Approximate minimizer of 0.5 ||z - y||^2 + lambda * TV(z) by dual
// projection ascent with fixed step 0.25 and a fixed iteration budget.
// lambda == 0 returns y unchanged. The result is clamped to the input
// range, which can only lower both terms of the objective.
inline Image tv_denoise(const Image& y, double lambda, int iters = 50) {
    y.validate();
    if (!(lambda >= 0.0)) throw std::invalid_argument("tv_denoise: lambda must be >= 0");
    if (iters < 0) throw std::invalid_argument("tv_denoise: iters must be >= 0");
    if (lambda == 0.0 || iters == 0) return y;

    const int n = y.grid.n;
    const std::size_t sz = y.v.size();
    std::vector<double> px(sz, 0.0), py(sz, 0.0), div(sz, 0.0);
    const double tau = 0.25;

    auto at = [n](int i, int j) { return std::size_t(i) * n + j; };

    for (int it = 0; it < iters; ++it) {
        // div p with the adjoint (backward-difference) divergence
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double d = 0.0;
                if (j < n - 1) d += px[at(i, j)];
                if (j > 0) d -= px[at(i, j - 1)];
                if (i < n - 1) d += py[at(i, j)];
                if (i > 0) d -= py[at(i - 1, j)];
                div[at(i, j)] = d;
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double u0 = div[at(i, j)] - y.v[at(i, j)] / lambda;
                const double ux = (j + 1 < n) ? (div[at(i, j + 1)] - y.v[at(i, j + 1)] / lambda) - u0 : 0.0;
                const double uy = (i + 1 < n) ? (div[at(i + 1, j)] - y.v[at(i + 1, j)] / lambda) - u0 : 0.0;
                const double mag = std::sqrt(ux * ux + uy * uy);
                const double denom = 1.0 + tau * mag;
                px[at(i, j)] = (px[at(i, j)] + tau * ux) / denom;
                py[at(i, j)] = (py[at(i, j)] + tau * uy) / denom;
            }
        }
    }

    // final divergence at the returned dual point
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double d = 0.0;
            if (j < n - 1) d += px[at(i, j)];
            if (j > 0) d -= px[at(i, j - 1)];
            if (i < n - 1) d += py[at(i, j)];
            if (i > 0) d -= py[at(i - 1, j)];
            div[at(i, j)] = d;
        }
    }

    double lo = y.v[0], hi = y.v[0];
    for (double v : y.v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Image out = y;
    for (std::size_t k = 0; k < sz; ++k)
        out.v[k] = std::clamp(y.v[k] - lambda * div[k], lo, hi);
    return out;
}

} // namespace force
