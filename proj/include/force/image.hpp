#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace force {

// Square pixel grid centered on the origin. Pixel (i, j) has center
//   x = (j - (n-1)/2) * pixel_size   (j = column, +x right)
//   y = (i - (n-1)/2) * pixel_size   (i = row,    +y up)
struct ImageGrid {
    int n = 0;               // pixels per side
    double pixel_size = 1.0; // physical width of one pixel

    void validate() const {
        if (n < 2) throw std::invalid_argument("ImageGrid: n must be >= 2");
        if (!(pixel_size > 0.0)) throw std::invalid_argument("ImageGrid: pixel_size must be > 0");
    }
    double center() const { return 0.5 * (n - 1); }
    double half_width() const { return 0.5 * n * pixel_size; }
    bool operator==(const ImageGrid& o) const { return n == o.n && pixel_size == o.pixel_size; }
};

struct Image {
    ImageGrid grid;
    std::vector<double> v; // row-major, v[i * n + j]

    Image() = default;
    explicit Image(const ImageGrid& g, double fill = 0.0) : grid(g), v(std::size_t(g.n) * g.n, fill) {}

    double& at(int i, int j) { return v[std::size_t(i) * grid.n + j]; }
    double at(int i, int j) const { return v[std::size_t(i) * grid.n + j]; }
    std::size_t size() const { return v.size(); }

    void validate() const {
        grid.validate();
        if (v.size() != std::size_t(grid.n) * grid.n)
            throw std::invalid_argument("Image: buffer size does not match grid");
    }
};

// Boolean stencil on an image grid (metal masks, segmentation output).
struct PixelMask {
    ImageGrid grid;
    std::vector<unsigned char> v;

    PixelMask() = default;
    explicit PixelMask(const ImageGrid& g, bool fill = false)
        : grid(g), v(std::size_t(g.n) * g.n, fill ? 1 : 0) {}

    bool at(int i, int j) const { return v[std::size_t(i) * grid.n + j] != 0; }
    void set(int i, int j, bool b) { v[std::size_t(i) * grid.n + j] = b ? 1 : 0; }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto b : v) c += (b != 0);
        return c;
    }
};

inline void check_same_shape(const Image& a, const Image& b, const char* who) {
    if (!(a.grid == b.grid) || a.v.size() != b.v.size())
        throw std::invalid_argument(std::string(who) + ": image shapes differ");
}

// Small vector-space helpers used by the iterative solvers.

inline double dot(const Image& a, const Image& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.v.size(); ++k) s += a.v[k] * b.v[k];
    return s;
}

inline double norm2(const Image& a) { return std::sqrt(dot(a, a)); }

inline double max_abs(const Image& a) {
    double m = 0.0;
    for (double x : a.v) m = std::max(m, std::fabs(x));
    return m;
}

// a += s * b
inline void axpy(Image& a, double s, const Image& b) {
    for (std::size_t k = 0; k < a.v.size(); ++k) a.v[k] += s * b.v[k];
}

inline Image operator+(const Image& a, const Image& b) {
    Image r = a;
    for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] += b.v[k];
    return r;
}

inline Image operator-(const Image& a, const Image& b) {
    Image r = a;
    for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] -= b.v[k];
    return r;
}

inline Image operator*(double s, const Image& a) {
    Image r = a;
    for (double& x : r.v) x *= s;
    return r;
}

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace force
