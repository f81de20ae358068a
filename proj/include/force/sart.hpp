#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "force/errors.hpp"
#include "force/geometry.hpp"
#include "force/image.hpp"
#include "force/projector.hpp"

namespace force {

struct OsSartConfig {
    int n_subsets = 8;
    double omega = 1.0;  // relaxation
    int passes = 1;      // full sweeps over all subsets
    double eps = 1.0e-8; // guard for empty rows/columns
};

// Precomputed per-subset geometry plus the SART row/column normalizers.
// Subset s owns the views v with v % n_subsets == s.
struct OsSartPlan {
    ImageGrid grid;
    ScanGeometry full_geo;
    OsSartConfig cfg;
    std::vector<ScanGeometry> sub_geo;
    std::vector<std::vector<int>> sub_views;
    std::vector<std::vector<double>> row_sum; // forward projection of ones, per subset
    std::vector<Image> col_sum;               // back projection of subset ones
};

inline OsSartPlan make_os_sart_plan(const ImageGrid& grid, const ScanGeometry& geo,
                                    const OsSartConfig& cfg) {
    grid.validate();
    geo.validate();
    if (cfg.n_subsets < 1 || cfg.n_subsets > geo.n_views())
        throw std::invalid_argument("os_sart: n_subsets out of range");
    if (!(cfg.omega > 0.0)) throw std::invalid_argument("os_sart: omega must be > 0");
    if (cfg.passes < 0) throw std::invalid_argument("os_sart: passes must be >= 0");
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("os_sart: eps must be > 0");

    OsSartPlan plan;
    plan.grid = grid;
    plan.full_geo = geo;
    plan.cfg = cfg;
    plan.sub_geo.resize(cfg.n_subsets);
    plan.sub_views.resize(cfg.n_subsets);
    for (int v = 0; v < geo.n_views(); ++v) plan.sub_views[v % cfg.n_subsets].push_back(v);

    Image ones(grid, 1.0);
    for (int s = 0; s < cfg.n_subsets; ++s) {
        ScanGeometry& sg = plan.sub_geo[s];
        sg = geo;
        sg.angles.clear();
        for (int v : plan.sub_views[s]) sg.angles.push_back(geo.angles[v]);
        Sinogram w = forward_project(ones, sg);
        plan.row_sum.push_back(std::move(w.v));
        Sinogram ind(sg, 1.0);
        plan.col_sum.push_back(back_project(ind, grid));
    }
    return plan;
}

inline Sinogram extract_subset(const Sinogram& sino, const OsSartPlan& plan, int s) {
    Sinogram sub(plan.sub_geo[s], 0.0);
    const int n_det = sino.geo.n_det;
    for (std::size_t k = 0; k < plan.sub_views[s].size(); ++k) {
        const int v = plan.sub_views[s][k];
        for (int d = 0; d < n_det; ++d) sub.at(static_cast<int>(k), d) = sino.at(v, d);
    }
    return sub;
}

// One relaxed SART update for subset s:
//   x += omega * V_s^-1 H_s^T W_s^-1 (p_s - H_s x)
// with W_s the ray sums and V_s the pixel sums of the subset system.
inline void os_sart_subset_update(Image& x, const Sinogram& sino, const OsSartPlan& plan, int s) {
    Sinogram r = extract_subset(sino, plan, s);
    Sinogram hx = forward_project(x, plan.sub_geo[s]);
    const std::vector<double>& w = plan.row_sum[s];
    for (std::size_t k = 0; k < r.v.size(); ++k)
        r.v[k] = (r.v[k] - hx.v[k]) / std::max(w[k], plan.cfg.eps);
    Image corr = back_project(r, plan.grid);
    const Image& vsum = plan.col_sum[s];
    for (std::size_t k = 0; k < x.v.size(); ++k) {
        x.v[k] += plan.cfg.omega * corr.v[k] / std::max(vsum.v[k], plan.cfg.eps);
        if (!std::isfinite(x.v[k]))
            throw NumericalError("os_sart: non-finite value in subset update " + std::to_string(s));
    }
}

// Ordered-subsets SART starting from x0. Subsets are visited in index order
// within each pass.
inline Image os_sart(const Sinogram& sino, const ImageGrid& grid, const Image& x0,
                     const OsSartConfig& cfg = {}) {
    sino.validate();
    check_same_shape(x0, Image(grid), "os_sart");
    OsSartPlan plan = make_os_sart_plan(grid, sino.geo, cfg);
    Image x = x0;
    for (int pass = 0; pass < cfg.passes; ++pass)
        for (int s = 0; s < cfg.n_subsets; ++s) os_sart_subset_update(x, sino, plan, s);
    return x;
}

} // namespace force
