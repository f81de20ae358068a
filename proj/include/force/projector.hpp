#pragma once

#include <algorithm>
#include <cmath>

#include "force/geometry.hpp"
#include "force/image.hpp"
#include "force/parallel.hpp"

namespace force {

// Joseph-style interpolating projector pair for 2D parallel-beam CT.
//
// For each ray the image is swept along its dominant axis; at every grid
// line crossing the two nearest pixels contribute with linear (hat)
// weights, and the per-step path length h/|cos| (or h/|sin|) converts the
// sum into a line integral. back_project applies the exact algebraic
// transpose of the same weights, pixel by pixel, so <Hx, y> == <x, H^T y>
// up to floating-point rounding and results do not depend on the thread
// count.

inline Sinogram forward_project(const Image& img, const ScanGeometry& geo) {
    img.validate();
    geo.validate();

    const int n = img.grid.n;
    const double h = img.grid.pixel_size;
    const double cx = img.grid.center();
    const int n_det = geo.n_det;
    Sinogram sino(geo, 0.0);

    parallel_for(geo.angles.size(), [&](std::size_t view) {
        const double theta = geo.angles[view];
        const double cs = std::cos(theta);
        const double sn = std::sin(theta);
        double* row = &sino.v[view * std::size_t(n_det)];

        if (std::fabs(cs) >= std::fabs(sn)) {
            // Sweep over image rows; interpolate along x.
            const double step = img.grid.pixel_size / std::fabs(cs);
            for (int d = 0; d < n_det; ++d) {
                const double s = geo.det_pos(d);
                double acc = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double y = (i - cx) * h;
                    const double fx = (s - y * sn) / (h * cs) + cx;
                    const int j0 = static_cast<int>(std::floor(fx));
                    const double w = fx - j0;
                    if (j0 >= 0 && j0 < n) acc += (1.0 - w) * img.at(i, j0);
                    if (j0 + 1 >= 0 && j0 + 1 < n) acc += w * img.at(i, j0 + 1);
                }
                row[d] = acc * step;
            }
        } else {
            // Sweep over image columns; interpolate along y.
            const double step = img.grid.pixel_size / std::fabs(sn);
            for (int d = 0; d < n_det; ++d) {
                const double s = geo.det_pos(d);
                double acc = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double x = (j - cx) * h;
                    const double fy = (s - x * cs) / (h * sn) + cx;
                    const int i0 = static_cast<int>(std::floor(fy));
                    const double w = fy - i0;
                    if (i0 >= 0 && i0 < n) acc += (1.0 - w) * img.at(i0, j);
                    if (i0 + 1 >= 0 && i0 + 1 < n) acc += w * img.at(i0 + 1, j);
                }
                row[d] = acc * step;
            }
        }
    });
    return sino;
}

inline Image back_project(const Sinogram& sino, const ImageGrid& grid) {
    sino.validate();
    grid.validate();

    const ScanGeometry& geo = sino.geo;
    const int n = grid.n;
    const double h = grid.pixel_size;
    const double cx = grid.center();
    const int n_det = geo.n_det;
    const int n_views = geo.n_views();
    const double off0 = geo.det_offset - geo.det_center() * geo.det_spacing;

    // Pre-resolve per-view constants once.
    struct ViewCoef {
        bool ydom;
        double step;   // path length per sweep step
        double alpha;  // d-coefficient of the fractional index
        double inv_hc; // 1 / (h * dominant trig)
        double trig;   // the non-dominant trig factor
    };
    std::vector<ViewCoef> coef(n_views);
    for (int v = 0; v < n_views; ++v) {
        const double cs = std::cos(geo.angles[v]);
        const double sn = std::sin(geo.angles[v]);
        ViewCoef& c = coef[v];
        c.ydom = std::fabs(cs) >= std::fabs(sn);
        if (c.ydom) {
            c.step = h / std::fabs(cs);
            c.inv_hc = 1.0 / (h * cs);
            c.trig = sn;
        } else {
            c.step = h / std::fabs(sn);
            c.inv_hc = 1.0 / (h * sn);
            c.trig = cs;
        }
        c.alpha = geo.det_spacing * c.inv_hc;
    }

    Image out(grid, 0.0);
    parallel_for(std::size_t(n), [&](std::size_t row) {
        const int i = static_cast<int>(row);
        const double y = (i - cx) * h;
        for (int j = 0; j < n; ++j) {
            const double x = (j - cx) * h;
            double acc = 0.0;
            for (int v = 0; v < n_views; ++v) {
                const ViewCoef& c = coef[v];
                // Fractional sweep index of pixel axis as a function of d.
                const double pos = c.ydom ? y : x;  // coordinate along sweep axis
                const double idx = c.ydom ? j : i;  // pixel index being weighted
                const double beta = (off0 - pos * c.trig) * c.inv_hc + cx;
                const double e1 = (idx - 1.0 - beta) / c.alpha;
                const double e2 = (idx + 1.0 - beta) / c.alpha;
                int lo = static_cast<int>(std::ceil(std::min(e1, e2)));
                int hi = static_cast<int>(std::floor(std::max(e1, e2)));
                if (lo < 0) lo = 0;
                if (hi > n_det - 1) hi = n_det - 1;
                const double* srow = &sino.v[std::size_t(v) * n_det];
                double vacc = 0.0;
                for (int d = lo; d <= hi; ++d) {
                    const double w = 1.0 - std::fabs(c.alpha * d + beta - idx);
                    if (w > 0.0) vacc += w * srow[d];
                }
                acc += vacc * c.step;
            }
            out.at(i, j) = acc;
        }
    });
    return out;
}

} // namespace force
