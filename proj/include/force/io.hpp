#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "force/geometry.hpp"
#include "force/image.hpp"
#include "force/metrics.hpp"

namespace force {

namespace detail {

inline void put_u32le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32le(std::istream& is, const char* who) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::invalid_argument(std::string(who) + ": truncated file");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

inline void put_f32le(std::ostream& os, float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    put_u32le(os, u);
}

inline float get_f32le(std::istream& is, const char* who) {
    const std::uint32_t u = get_u32le(is, who);
    float v;
    std::memcpy(&v, &u, 4);
    return v;
}

} // namespace detail

// TIMG: "TIMG", version byte 1, u32 rows, u32 cols, f32 pixel_size, then
// rows*cols f32 values row-major. All integers and floats little-endian.
inline void write_timg(const Image& img, const std::string& path) {
    img.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::invalid_argument("write_timg: cannot open " + path);
    os.write("TIMG", 4);
    os.put(1);
    detail::put_u32le(os, static_cast<std::uint32_t>(img.grid.n));
    detail::put_u32le(os, static_cast<std::uint32_t>(img.grid.n));
    detail::put_f32le(os, static_cast<float>(img.grid.pixel_size));
    for (double v : img.v) detail::put_f32le(os, static_cast<float>(v));
    if (!os) throw std::invalid_argument("write_timg: write failed on " + path);
}

inline Image read_timg(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("read_timg: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "TIMG", 4) != 0)
        throw std::invalid_argument("read_timg: bad magic in " + path);
    const int version = is.get();
    if (version != 1) throw std::invalid_argument("read_timg: unsupported version in " + path);
    const std::uint32_t rows = detail::get_u32le(is, "read_timg");
    const std::uint32_t cols = detail::get_u32le(is, "read_timg");
    if (rows != cols || rows < 2 || rows > 1u << 16)
        throw std::invalid_argument("read_timg: unsupported dimensions in " + path);
    const float px = detail::get_f32le(is, "read_timg");
    if (!(px > 0.0f)) throw std::invalid_argument("read_timg: bad pixel size in " + path);
    Image img(ImageGrid{static_cast<int>(rows), double(px)});
    for (double& v : img.v) v = detail::get_f32le(is, "read_timg");
    return img;
}

// TSIN: "TSIN", version byte 1, u32 n_views, u32 n_det, f32 det_spacing,
// f32 det_offset, n_views f32 angles, then the f32 samples row-major.
inline void write_tsin(const Sinogram& sino, const std::string& path) {
    sino.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::invalid_argument("write_tsin: cannot open " + path);
    os.write("TSIN", 4);
    os.put(1);
    detail::put_u32le(os, static_cast<std::uint32_t>(sino.geo.n_views()));
    detail::put_u32le(os, static_cast<std::uint32_t>(sino.geo.n_det));
    detail::put_f32le(os, static_cast<float>(sino.geo.det_spacing));
    detail::put_f32le(os, static_cast<float>(sino.geo.det_offset));
    for (double a : sino.geo.angles) detail::put_f32le(os, static_cast<float>(a));
    for (double v : sino.v) detail::put_f32le(os, static_cast<float>(v));
    if (!os) throw std::invalid_argument("write_tsin: write failed on " + path);
}

inline Sinogram read_tsin(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("read_tsin: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "TSIN", 4) != 0)
        throw std::invalid_argument("read_tsin: bad magic in " + path);
    const int version = is.get();
    if (version != 1) throw std::invalid_argument("read_tsin: unsupported version in " + path);
    const std::uint32_t n_views = detail::get_u32le(is, "read_tsin");
    const std::uint32_t n_det = detail::get_u32le(is, "read_tsin");
    if (n_views < 1 || n_det < 1 || n_views > 1u << 20 || n_det > 1u << 20)
        throw std::invalid_argument("read_tsin: unsupported dimensions in " + path);
    ScanGeometry geo;
    geo.n_det = static_cast<int>(n_det);
    geo.det_spacing = detail::get_f32le(is, "read_tsin");
    geo.det_offset = detail::get_f32le(is, "read_tsin");
    if (!(geo.det_spacing > 0.0)) throw std::invalid_argument("read_tsin: bad det_spacing");
    geo.angles.resize(n_views);
    for (double& a : geo.angles) a = detail::get_f32le(is, "read_tsin");
    Sinogram sino(geo);
    for (double& v : sino.v) v = detail::get_f32le(is, "read_tsin");
    return sino;
}

// Masks travel in the same containers with 0/1 values.

inline void write_mask(const PixelMask& m, const std::string& path) {
    Image img(m.grid, 0.0);
    for (std::size_t k = 0; k < m.v.size(); ++k) img.v[k] = m.v[k] ? 1.0 : 0.0;
    write_timg(img, path);
}

inline PixelMask read_pixel_mask(const std::string& path) {
    const Image img = read_timg(path);
    PixelMask m(img.grid, false);
    for (std::size_t k = 0; k < img.v.size(); ++k) m.v[k] = img.v[k] > 0.5 ? 1 : 0;
    return m;
}

inline void write_trace(const TraceMask& t, const std::string& path) {
    Sinogram s(t.geo, 0.0);
    for (std::size_t k = 0; k < t.v.size(); ++k) s.v[k] = t.v[k] ? 1.0 : 0.0;
    write_tsin(s, path);
}

inline TraceMask read_trace(const std::string& path) {
    const Sinogram s = read_tsin(path);
    TraceMask t(s.geo, false);
    for (std::size_t k = 0; k < s.v.size(); ++k) t.v[k] = s.v[k] > 0.5 ? 1 : 0;
    return t;
}

// 8-bit PGM preview with a display window [lo, hi].
inline void write_pgm(const Image& img, const std::string& path, double lo, double hi) {
    img.validate();
    if (!(hi > lo)) throw std::invalid_argument("write_pgm: need hi > lo");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::invalid_argument("write_pgm: cannot open " + path);
    os << "P5\n" << img.grid.n << ' ' << img.grid.n << "\n255\n";
    for (double v : img.v) {
        double t = (v - lo) / (hi - lo);
        if (t < 0.0) t = 0.0;
        if (t > 1.0) t = 1.0;
        os.put(static_cast<char>(static_cast<int>(t * 255.0 + 0.5)));
    }
}

inline const char* kMetricsCsvHeader = "name,psnr_db,ssim,rmse";

inline void write_metrics_csv(std::ostream& os,
                              const std::vector<std::pair<std::string, MetricReport>>& rows) {
    os << kMetricsCsvHeader << '\n';
    for (const auto& [name, r] : rows)
        os << name << ',' << r.psnr_db << ',' << r.ssim_val << ',' << r.rmse_val << '\n';
}

} // namespace force
