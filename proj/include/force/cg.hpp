#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "force/errors.hpp"
#include "force/geometry.hpp"
#include "force/image.hpp"
#include "force/projector.hpp"

namespace force {

struct CgResult {
    Image x;
    double rel_residual = 0.0; // ||b - A x|| / ||b||
    int iterations = 0;
};

// Conjugate gradients on a symmetric positive (semi)definite operator.
// Stops when ||r|| <= tol * ||b|| or after max_iter iterations.
inline CgResult cg_solve(const std::function<Image(const Image&)>& apply_A, const Image& b,
                         const Image& x0, double tol, int max_iter) {
    check_same_shape(b, x0, "cg_solve");
    if (!(tol >= 0.0)) throw std::invalid_argument("cg_solve: tol must be >= 0");
    if (max_iter < 0) throw std::invalid_argument("cg_solve: max_iter must be >= 0");

    CgResult res;
    res.x = x0;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.x = Image(b.grid, 0.0);
        return res;
    }

    Image r = b - apply_A(res.x);
    Image p = r;
    double rr = dot(r, r);
    res.rel_residual = std::sqrt(rr) / bnorm;
    for (int it = 0; it < max_iter && res.rel_residual > tol; ++it) {
        Image ap = apply_A(p);
        const double pap = dot(p, ap);
        if (!std::isfinite(pap) || pap <= 0.0)
            throw NumericalError("cg_solve: operator lost positive definiteness at iteration " +
                                 std::to_string(it));
        const double alpha = rr / pap;
        axpy(res.x, alpha, p);
        axpy(r, -alpha, ap);
        const double rr_new = dot(r, r);
        if (!std::isfinite(rr_new))
            throw NumericalError("cg_solve: non-finite residual at iteration " + std::to_string(it));
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t k = 0; k < p.v.size(); ++k) p.v[k] = r.v[k] + beta * p.v[k];
        res.rel_residual = std::sqrt(rr) / bnorm;
        res.iterations = it + 1;
    }
    return res;
}

struct RedConfig {
    double eta = 1.0;    // pull toward the current sample
    double cg_tol = 1.0e-6;
    int cg_iters = 30;
    // Solve the unscaled regularizer form (eta/2 on the right-hand side)
    // instead of the proximal form. Both share the fixed point when the
    // data term vanishes at x_i, but the proximal form is the default.
    bool literal_half = false;
};

// Regularized data-consistency step: solves
//   (H^T H + eta I) xbar = H^T p + eta * x_i      (default)
//   (H^T H + eta I) xbar = H^T p + eta/2 * x_i    (literal_half)
// by CG warm-started at x_i.
inline Image red_condition(const Image& x_i, const Sinogram& sino, const RedConfig& cfg = {}) {
    x_i.validate();
    sino.validate();
    if (!(cfg.eta >= 0.0)) throw std::invalid_argument("red_condition: eta must be >= 0");

    const ScanGeometry geo = sino.geo;
    const ImageGrid grid = x_i.grid;
    auto apply_A = [&](const Image& z) {
        Image out = back_project(forward_project(z, geo), grid);
        if (cfg.eta > 0.0) axpy(out, cfg.eta, z);
        return out;
    };
    Image b = back_project(sino, grid);
    axpy(b, cfg.literal_half ? 0.5 * cfg.eta : cfg.eta, x_i);
    return cg_solve(apply_A, b, x_i, cfg.cg_tol, cfg.cg_iters).x;
}

} // namespace force
