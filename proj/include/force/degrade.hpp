#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "force/geometry.hpp"
#include "force/image.hpp"
#include "force/projector.hpp"

namespace force {

// Photon-counting noise model: along each ray the expected detected count
// is dose * I0 * exp(-p) with p the clean line integral.
struct NoiseModel {
    double dose = 0.25; // fraction of the full-dose flux
    double I0 = 1.0e5;  // full-dose photons per ray
    std::uint64_t seed = 0;
};

// Draws Poisson counts per ray and log-converts back to line integrals.
// Rays are visited in row-major order with one generator, so a given seed
// reproduces bit-identical output. Zero counts are clamped to one photon.
inline Sinogram apply_low_dose(const Sinogram& clean, const NoiseModel& nm) {
    clean.validate();
    if (!(nm.dose > 0.0) || !(nm.I0 > 0.0))
        throw std::invalid_argument("apply_low_dose: dose and I0 must be > 0");
    for (double p : clean.v) {
        if (!std::isfinite(p)) throw std::invalid_argument("apply_low_dose: non-finite line integral");
        if (p < 0.0) throw std::invalid_argument("apply_low_dose: negative line integral");
    }
    const double flux = nm.dose * nm.I0;
    std::mt19937_64 rng(nm.seed);
    Sinogram out = clean;
    for (double& p : out.v) {
        const double mean = flux * std::exp(-p);
        std::poisson_distribution<long long> pois(mean);
        long long counts = pois(rng);
        if (counts < 1) counts = 1;
        p = -std::log(static_cast<double>(counts) / flux);
    }
    return out;
}

// Keeps n_keep views at indices floor(i * n_views / n_keep), i = 0..n_keep-1.
inline Sinogram subsample_views(const Sinogram& full, int n_keep) {
    full.validate();
    const int n_views = full.geo.n_views();
    if (n_keep < 1 || n_keep > n_views)
        throw std::invalid_argument("subsample_views: n_keep out of range");
    ScanGeometry geo = full.geo;
    geo.angles.resize(n_keep);
    Sinogram out;
    out.geo = geo;
    out.v.resize(std::size_t(n_keep) * geo.n_det);
    for (int i = 0; i < n_keep; ++i) {
        const int src = static_cast<int>((std::int64_t(i) * n_views) / n_keep);
        out.geo.angles[i] = full.geo.angles[src];
        for (int d = 0; d < geo.n_det; ++d) out.at(i, d) = full.at(src, d);
    }
    return out;
}

// Rays whose path crosses masked pixels, dilated along the detector axis.
inline TraceMask compute_trace(const PixelMask& mask, const ScanGeometry& geo, int margin = 1) {
    if (margin < 0) throw std::invalid_argument("compute_trace: margin must be >= 0");
    Image ind(mask.grid, 0.0);
    for (std::size_t k = 0; k < mask.v.size(); ++k) ind.v[k] = mask.v[k] ? 1.0 : 0.0;
    Sinogram proj = forward_project(ind, geo);

    TraceMask trace(geo, false);
    const int n_det = geo.n_det;
    for (int v = 0; v < geo.n_views(); ++v) {
        for (int d = 0; d < n_det; ++d) {
            if (proj.at(v, d) > 0.0) {
                const int lo = std::max(0, d - margin);
                const int hi = std::min(n_det - 1, d + margin);
                for (int k = lo; k <= hi; ++k) trace.set(v, k, true);
            }
        }
    }
    return trace;
}

enum class MetalCorruption { saturate, void_out };

// Marker for measurements discarded in void mode; real line integrals are
// never negative.
inline constexpr double kVoidValue = -1.0;

// saturate: in-trace rays read the photon-starved ceiling log(I0).
// void_out: in-trace rays are replaced by the kVoidValue marker.
inline Sinogram corrupt_metal_sinogram(const Sinogram& sino, const TraceMask& trace,
                                       MetalCorruption mode, double I0 = 1.0e5) {
    sino.validate();
    if (!(sino.geo == trace.geo))
        throw std::invalid_argument("corrupt_metal_sinogram: trace geometry differs");
    if (!(I0 > 1.0)) throw std::invalid_argument("corrupt_metal_sinogram: I0 must be > 1");
    const double ceiling = std::log(I0); // -log(1 photon / I0)
    Sinogram out = sino;
    for (std::size_t k = 0; k < out.v.size(); ++k) {
        if (!trace.v[k]) continue;
        out.v[k] = (mode == MetalCorruption::saturate) ? ceiling : kVoidValue;
    }
    return out;
}

} // namespace force
