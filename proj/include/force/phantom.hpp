#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "force/geometry.hpp"
#include "force/image.hpp"

namespace force {

// Ellipse in normalized coordinates: the image grid square maps to
// [-1, 1] x [-1, 1]. phi rotates the ellipse counter-clockwise.
struct Ellipse {
    double value = 0.0; // added to every pixel whose center lies inside
    double a = 0.0;     // semi-axis along the ellipse x direction
    double b = 0.0;     // semi-axis along the ellipse y direction
    double x0 = 0.0;
    double y0 = 0.0;
    double phi = 0.0;   // radians
};

struct EllipsePhantomSpec {
    std::vector<Ellipse> ellipses;
};

inline bool ellipse_contains(const Ellipse& e, double x, double y) {
    const double dx = x - e.x0;
    const double dy = y - e.y0;
    const double c = std::cos(e.phi);
    const double s = std::sin(e.phi);
    const double u = dx * c + dy * s;
    const double w = -dx * s + dy * c;
    return (u * u) / (e.a * e.a) + (w * w) / (e.b * e.b) <= 1.0;
}

// Point-sampled rendering at pixel centers; overlapping ellipses add.
inline Image render(const EllipsePhantomSpec& spec, const ImageGrid& grid) {
    grid.validate();
    for (const Ellipse& e : spec.ellipses)
        if (!(e.a > 0.0) || !(e.b > 0.0))
            throw std::invalid_argument("render: ellipse semi-axes must be > 0");

    Image img(grid, 0.0);
    const double cx = grid.center();
    const double scale = 2.0 / grid.n; // pixel index -> normalized coordinate
    for (int i = 0; i < grid.n; ++i) {
        const double y = (i - cx) * scale;
        for (int j = 0; j < grid.n; ++j) {
            const double x = (j - cx) * scale;
            double val = 0.0;
            for (const Ellipse& e : spec.ellipses)
                if (ellipse_contains(e, x, y)) val += e.value;
            // nominally zero intensity sums can land a few ulp below
            // zero; snap those so backgrounds stay exactly nonnegative
            if (val < 0.0 && val > -1.0e-12) val = 0.0;
            img.at(i, j) = val;
        }
    }
    return img;
}

inline constexpr double kDegree = kPi / 180.0;

// The usual high-contrast head phantom variant: ten ellipses, background 0,
// values in [0, 1].
inline EllipsePhantomSpec shepp_logan_spec() {
    const double d = kDegree;
    EllipsePhantomSpec s;
    s.ellipses = {
        {1.0, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
        {-0.8, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
        {-0.2, 0.1100, 0.3100, 0.22, 0.0000, -18.0 * d},
        {-0.2, 0.1600, 0.4100, -0.22, 0.0000, 18.0 * d},
        {0.1, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
        {0.1, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
        {0.1, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
        {0.1, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
        {0.1, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
        {0.1, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
    };
    return s;
}

inline Image shepp_logan(const ImageGrid& grid) { return render(shepp_logan_spec(), grid); }

// Jittered copies of the head phantom, used as a small training/prior set.
// jitter scales a relative perturbation of centers, axes and intensities.
inline std::vector<Image> make_phantom_variants(const ImageGrid& grid, int count,
                                                std::uint64_t seed, double jitter = 0.1) {
    if (count < 1) throw std::invalid_argument("make_phantom_variants: count must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Image> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        EllipsePhantomSpec spec = shepp_logan_spec();
        for (Ellipse& e : spec.ellipses) {
            e.x0 += jitter * 0.2 * u(rng);
            e.y0 += jitter * 0.2 * u(rng);
            e.a *= 1.0 + jitter * 0.5 * u(rng);
            e.b *= 1.0 + jitter * 0.5 * u(rng);
            e.phi += jitter * 0.3 * u(rng);
            e.value *= 1.0 + jitter * 0.25 * u(rng);
        }
        out.push_back(render(spec, grid));
    }
    return out;
}

struct MetalDisc {
    double cx = 0.0; // physical coordinates
    double cy = 0.0;
    double r = 0.0;
    double intensity = 4.0;
};

// Stamps metal discs into the image (overwriting what is underneath) and
// returns the pixel mask of stamped pixels. Discs must lie fully inside the
// grid square.
inline PixelMask insert_metal(Image& img, const std::vector<MetalDisc>& discs) {
    img.validate();
    const double half = img.grid.half_width();
    for (const MetalDisc& m : discs) {
        if (!(m.r > 0.0)) throw std::invalid_argument("insert_metal: disc radius must be > 0");
        if (m.cx - m.r < -half || m.cx + m.r > half || m.cy - m.r < -half || m.cy + m.r > half)
            throw std::invalid_argument("insert_metal: disc extends outside the grid");
    }
    PixelMask mask(img.grid, false);
    const double cx = img.grid.center();
    const double h = img.grid.pixel_size;
    for (const MetalDisc& m : discs) {
        for (int i = 0; i < img.grid.n; ++i) {
            const double y = (i - cx) * h;
            for (int j = 0; j < img.grid.n; ++j) {
                const double x = (j - cx) * h;
                const double dx = x - m.cx;
                const double dy = y - m.cy;
                if (dx * dx + dy * dy <= m.r * m.r) {
                    img.at(i, j) = m.intensity;
                    mask.set(i, j, true);
                }
            }
        }
    }
    return mask;
}

} // namespace force
