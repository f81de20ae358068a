#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "force/geometry.hpp"
#include "force/image.hpp"
#include "force/parallel.hpp"
#include "force/projector.hpp"

namespace force {

namespace detail {

// In-place iterative radix-2 FFT. inverse applies the 1/n scale.
inline void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / double(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> t = a[i + k + len / 2] * w;
                a[i + k] = u + t;
                a[i + k + len / 2] = u - t;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= double(n);
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

} // namespace detail

enum class Apodization { ram_lak, hann };

struct FilterSpec {
    Apodization apodization = Apodization::ram_lak;
    // Zero-pad length for the detector-row FFT. 0 picks the smallest power
    // of two >= 2 * n_det; explicit values must satisfy the same bound.
    int padded_size = 0;
};

// |f| response of the band-limited ramp, sampled on the padded FFT grid in
// cycles per unit detector length, with the optional Hann roll-off.
inline std::vector<double> ramp_response(int n_det, double det_spacing, const FilterSpec& fs) {
    if (n_det < 1) throw std::invalid_argument("ramp_response: n_det must be >= 1");
    if (!(det_spacing > 0.0)) throw std::invalid_argument("ramp_response: det_spacing must be > 0");
    std::size_t P = fs.padded_size == 0 ? detail::next_pow2(std::size_t(2) * n_det)
                                        : std::size_t(fs.padded_size);
    if (P < std::size_t(2) * n_det || (P & (P - 1)) != 0)
        throw std::invalid_argument("ramp_response: padded_size must be a power of two >= 2*n_det");

    std::vector<double> resp(P);
    for (std::size_t k = 0; k < P; ++k) {
        const std::size_t f = std::min(k, P - k); // bin distance from DC
        double r = double(f) / (double(P) * det_spacing);
        if (fs.apodization == Apodization::hann)
            r *= 0.5 * (1.0 + std::cos(kPi * double(f) / double(P / 2)));
        resp[k] = r;
    }
    return resp;
}

// Filtered back-projection for the parallel-beam geometry. Views are
// assumed to cover [0, pi) evenly; the quadrature weight pi/n_views and the
// back-projector's interpolation mass ds/h^2 are folded into the output.
inline Image fbp(const Sinogram& sino, const ImageGrid& grid, const FilterSpec& fs = {}) {
    sino.validate();
    grid.validate();
    const int n_det = sino.geo.n_det;
    const int n_views = sino.geo.n_views();
    const std::vector<double> resp = ramp_response(n_det, sino.geo.det_spacing, fs);
    const std::size_t P = resp.size();

    Sinogram filtered(sino.geo, 0.0);
    parallel_for(std::size_t(n_views), [&](std::size_t v) {
        std::vector<std::complex<double>> buf(P, 0.0);
        for (int d = 0; d < n_det; ++d) buf[d] = sino.v[v * n_det + d];
        detail::fft(buf, false);
        for (std::size_t k = 0; k < P; ++k) buf[k] *= resp[k];
        detail::fft(buf, true);
        for (int d = 0; d < n_det; ++d) filtered.v[v * n_det + d] = buf[d].real();
    });

    Image img = back_project(filtered, grid);
    const double scale = kPi / double(n_views) * sino.geo.det_spacing /
                         (grid.pixel_size * grid.pixel_size);
    for (double& x : img.v) x *= scale;
    return img;
}

} // namespace force
