#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "force/geometry.hpp"
#include "force/image.hpp"
#include "force/projector.hpp"

namespace force {

// Linear-interpolation metal artifact reduction: inside each contiguous
// in-trace run of a view the sinogram is replaced by the straight line
// between the nearest valid neighbors. Runs touching the row boundary
// extend the single available neighbor; a fully masked view has no valid
// data and is rejected.
inline Sinogram li_mar(const Sinogram& sino, const TraceMask& trace) {
    sino.validate();
    if (!(sino.geo == trace.geo)) throw std::invalid_argument("li_mar: trace geometry differs");

    const int n_det = sino.geo.n_det;
    Sinogram out = sino;
    for (int v = 0; v < sino.geo.n_views(); ++v) {
        int d = 0;
        while (d < n_det) {
            if (!trace.at(v, d)) {
                ++d;
                continue;
            }
            int end = d;
            while (end + 1 < n_det && trace.at(v, end + 1)) ++end;
            const int left = d - 1;
            const int right = end + 1;
            if (left < 0 && right >= n_det)
                throw std::invalid_argument("li_mar: view " + std::to_string(v) +
                                            " is fully masked");
            if (left < 0) {
                for (int k = d; k <= end; ++k) out.at(v, k) = sino.at(v, right);
            } else if (right >= n_det) {
                for (int k = d; k <= end; ++k) out.at(v, k) = sino.at(v, left);
            } else {
                const double a = sino.at(v, left);
                const double b = sino.at(v, right);
                for (int k = d; k <= end; ++k) {
                    const double w = double(k - left) / double(right - left);
                    out.at(v, k) = (1.0 - w) * a + w * b;
                }
            }
            d = end + 1;
        }
    }
    return out;
}

// Piecewise-constant tissue classification thresholds; values below air are
// air, then soft, then bone, and values at or above metal_floor are metal.
struct SegThresholds {
    double air = 0.05;
    double soft = 0.6;
    double metal_floor = 2.0;

    void validate() const {
        if (!(air < soft && soft < metal_floor))
            throw std::invalid_argument("SegThresholds: need air < soft < metal_floor");
    }
};

// Flattens the image to per-class mean values; metal pixels take the soft
// class value so the forward-projected prior carries no metal shadow.
inline Image classify_prior(const Image& x, const SegThresholds& th) {
    x.validate();
    th.validate();
    double sum[3] = {0, 0, 0};
    std::size_t cnt[3] = {0, 0, 0};
    auto cls = [&](double v) -> int {
        if (v < th.air) return 0;
        if (v < th.soft) return 1;
        if (v < th.metal_floor) return 2;
        return 3;
    };
    for (double v : x.v) {
        const int c = cls(v);
        if (c < 3) {
            sum[c] += v;
            ++cnt[c];
        }
    }
    // class value = class mean, or the interval midpoint when empty
    double val[3];
    val[0] = cnt[0] ? sum[0] / double(cnt[0]) : 0.0;
    val[1] = cnt[1] ? sum[1] / double(cnt[1]) : 0.5 * (th.air + th.soft);
    val[2] = cnt[2] ? sum[2] / double(cnt[2]) : 0.5 * (th.soft + th.metal_floor);

    Image prior = x;
    for (double& v : prior.v) {
        const int c = cls(v);
        v = (c == 3) ? val[1] : val[c];
    }
    return prior;
}

// Prior-image sinogram substitution. The current sample is flattened into
// a tissue-class prior, forward projected, and pasted into the trace. Each
// in-trace run is offset by a linear blend of the boundary mismatches so
// the row stays continuous at both run edges.
inline Sinogram sinogram_substitute(const Image& x_i, const Sinogram& sino, const TraceMask& trace,
                                    const SegThresholds& th = {}) {
    sino.validate();
    if (!(sino.geo == trace.geo))
        throw std::invalid_argument("sinogram_substitute: trace geometry differs");

    const Image prior = classify_prior(x_i, th);
    const Sinogram p_prior = forward_project(prior, sino.geo);

    const int n_det = sino.geo.n_det;
    Sinogram out = sino;
    for (int v = 0; v < sino.geo.n_views(); ++v) {
        int d = 0;
        while (d < n_det) {
            if (!trace.at(v, d)) {
                ++d;
                continue;
            }
            int end = d;
            while (end + 1 < n_det && trace.at(v, end + 1)) ++end;
            const int left = d - 1;
            const int right = end + 1;
            const bool has_l = left >= 0;
            const bool has_r = right < n_det;
            const double dl = has_l ? sino.at(v, left) - p_prior.at(v, left) : 0.0;
            const double dr = has_r ? sino.at(v, right) - p_prior.at(v, right) : 0.0;
            for (int k = d; k <= end; ++k) {
                double delta;
                if (has_l && has_r) {
                    const double w = double(k - left) / double(right - left);
                    delta = (1.0 - w) * dl + w * dr;
                } else if (has_l) {
                    delta = dl;
                } else if (has_r) {
                    delta = dr;
                } else {
                    delta = 0.0; // fully masked view: plain prior projection
                }
                out.at(v, k) = p_prior.at(v, k) + delta;
            }
            d = end + 1;
        }
    }
    return out;
}

} // namespace force
