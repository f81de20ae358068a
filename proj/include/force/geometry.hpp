#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "force/image.hpp"

namespace force {

inline constexpr double kPi = 3.14159265358979323846;

// 2D parallel-beam scan. View v measures line integrals along rays
// perpendicular to the direction (cos angle[v], sin angle[v]); detector
// element d sits at signed offset
//   s = (d - (n_det-1)/2) * det_spacing + det_offset
// along that direction.
struct ScanGeometry {
    std::vector<double> angles; // radians
    int n_det = 0;
    double det_spacing = 1.0;
    double det_offset = 0.0;

    int n_views() const { return static_cast<int>(angles.size()); }

    void validate() const {
        if (angles.empty()) throw std::invalid_argument("ScanGeometry: no views");
        if (n_det < 1) throw std::invalid_argument("ScanGeometry: n_det must be >= 1");
        if (!(det_spacing > 0.0)) throw std::invalid_argument("ScanGeometry: det_spacing must be > 0");
        for (double a : angles)
            if (!std::isfinite(a)) throw std::invalid_argument("ScanGeometry: non-finite angle");
    }
    double det_center() const { return 0.5 * (n_det - 1); }
    double det_pos(int d) const { return (d - det_center()) * det_spacing + det_offset; }

    bool operator==(const ScanGeometry& o) const {
        return angles == o.angles && n_det == o.n_det && det_spacing == o.det_spacing &&
               det_offset == o.det_offset;
    }
};

// Equally spaced views over [0, pi), detector row wide enough to cover the
// grid diagonal, detector pitch equal to the pixel pitch.
inline ScanGeometry make_parallel_geometry(int n_views, const ImageGrid& grid) {
    grid.validate();
    if (n_views < 1) throw std::invalid_argument("make_parallel_geometry: n_views must be >= 1");
    ScanGeometry g;
    g.angles.resize(n_views);
    for (int v = 0; v < n_views; ++v) g.angles[v] = kPi * v / n_views;
    g.n_det = static_cast<int>(std::ceil(std::sqrt(2.0) * grid.n));
    g.det_spacing = grid.pixel_size;
    g.det_offset = 0.0;
    return g;
}

struct Sinogram {
    ScanGeometry geo;
    std::vector<double> v; // row-major, v[view * n_det + d]

    Sinogram() = default;
    explicit Sinogram(const ScanGeometry& g, double fill = 0.0)
        : geo(g), v(std::size_t(g.n_views()) * g.n_det, fill) {}

    double& at(int view, int d) { return v[std::size_t(view) * geo.n_det + d]; }
    double at(int view, int d) const { return v[std::size_t(view) * geo.n_det + d]; }
    std::size_t size() const { return v.size(); }

    void validate() const {
        geo.validate();
        if (v.size() != std::size_t(geo.n_views()) * geo.n_det)
            throw std::invalid_argument("Sinogram: buffer size does not match geometry");
    }
};

// Boolean stencil on sinogram rays (metal trace).
struct TraceMask {
    ScanGeometry geo;
    std::vector<unsigned char> v;

    TraceMask() = default;
    explicit TraceMask(const ScanGeometry& g, bool fill = false)
        : geo(g), v(std::size_t(g.n_views()) * g.n_det, fill ? 1 : 0) {}

    bool at(int view, int d) const { return v[std::size_t(view) * geo.n_det + d] != 0; }
    void set(int view, int d, bool b) { v[std::size_t(view) * geo.n_det + d] = b ? 1 : 0; }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto b : v) c += (b != 0);
        return c;
    }
};

inline void check_same_shape(const Sinogram& a, const Sinogram& b, const char* who) {
    if (!(a.geo == b.geo) || a.v.size() != b.v.size())
        throw std::invalid_argument(std::string(who) + ": sinogram shapes differ");
}

inline double dot(const Sinogram& a, const Sinogram& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.v.size(); ++k) s += a.v[k] * b.v[k];
    return s;
}

inline double norm2(const Sinogram& a) { return std::sqrt(dot(a, a)); }

} // namespace force
