#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "force/pfgm.hpp"
#include "force/toynet.hpp"

namespace force {

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::invalid_argument("checkpoint: truncated file");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

inline void put_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::invalid_argument("checkpoint: truncated file");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

} // namespace detail

inline constexpr char kCheckpointMagic[8] = {'F', 'O', 'R', 'C', 'E', 'N', 'E', 'T'};

// Layout: magic "FORCENET", u32 version (1), u32 width count, u32 widths
// (input first), f64 sigma_data, f64 D, then per layer the row-major weight
// matrix followed by the bias vector, all little-endian f64.
inline void save_checkpoint(const ToyNet& net, const PfgmConfig& cfg, const std::string& path) {
    net.validate();
    cfg.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::invalid_argument("save_checkpoint: cannot open " + path);
    os.write(kCheckpointMagic, 8);
    detail::put_u32(os, 1);
    detail::put_u32(os, static_cast<std::uint32_t>(net.layers.size() + 1));
    detail::put_u32(os, static_cast<std::uint32_t>(net.layers.front().in));
    for (const LinearLayer& L : net.layers) detail::put_u32(os, static_cast<std::uint32_t>(L.out));
    detail::put_f64(os, cfg.sigma_data);
    detail::put_f64(os, cfg.D);
    for (const LinearLayer& L : net.layers) {
        for (double w : L.W) detail::put_f64(os, w);
        for (double b : L.b) detail::put_f64(os, b);
    }
    if (!os) throw std::invalid_argument("save_checkpoint: write failed on " + path);
}

struct Checkpoint {
    ToyNet net;
    double sigma_data = 0.5;
    double D = 128.0;
};

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("load_checkpoint: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw std::invalid_argument("load_checkpoint: bad magic in " + path);
    const std::uint32_t version = detail::get_u32(is);
    if (version != 1)
        throw std::invalid_argument("load_checkpoint: unsupported version " +
                                    std::to_string(version));
    const std::uint32_t n_widths = detail::get_u32(is);
    if (n_widths < 2 || n_widths > 64)
        throw std::invalid_argument("load_checkpoint: implausible layer count");
    std::vector<int> widths(n_widths);
    for (auto& w : widths) {
        w = static_cast<int>(detail::get_u32(is));
        if (w < 1) throw std::invalid_argument("load_checkpoint: zero layer width");
    }
    Checkpoint ck;
    ck.sigma_data = detail::get_f64(is);
    ck.D = detail::get_f64(is);
    ck.net.n_pixels = widths.back();
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        LinearLayer L;
        L.in = widths[l];
        L.out = widths[l + 1];
        L.W.resize(std::size_t(L.in) * L.out);
        L.b.resize(std::size_t(L.out));
        for (double& w : L.W) w = detail::get_f64(is);
        for (double& b : L.b) b = detail::get_f64(is);
        ck.net.layers.push_back(std::move(L));
    }
    if (ck.net.layers.front().in != ck.net.n_pixels + 1)
        throw std::invalid_argument("load_checkpoint: widths do not describe a denoiser net");
    ck.net.validate();
    return ck;
}

} // namespace force
