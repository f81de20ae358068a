#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "force/image.hpp"
#include "force/pfgm.hpp"

namespace force {

// Noise-conditioned restorer f(x, sigma) ~= E[clean | noisy = x at level sigma].
struct Denoiser {
    virtual ~Denoiser() = default;
    virtual Image denoise(const Image& x, double sigma) const = 0;
};

struct DiscreteDataset {
    std::vector<Image> items;

    void validate() const {
        if (items.empty()) throw std::invalid_argument("DiscreteDataset: empty");
        for (const Image& im : items) {
            im.validate();
            if (!(im.grid == items.front().grid))
                throw std::invalid_argument("DiscreteDataset: mixed grids");
        }
    }
};

namespace detail {

// Posterior weights over dataset points under the heavy-tailed perturbation
// kernel 1/(||x-y||^2 + r^2)^((N+D)/2) with r = sigma*sqrt(D), or under the
// Gaussian kernel in the diffusion limit. Computed in log space with a max
// shift. Returns the index of an exact hit (zero distance at r == 0) or -1.
inline int posterior_weights(const DiscreteDataset& data, const Image& x, double sigma,
                             const PfgmConfig& cfg, bool gaussian_limit,
                             std::vector<double>& w) {
    data.validate();
    x.validate();
    if (!(x.grid == data.items.front().grid))
        throw std::invalid_argument("posterior_weights: grid mismatch");
    if (!(sigma >= 0.0)) throw std::invalid_argument("posterior_weights: sigma must be >= 0");

    const std::size_t K = data.items.size();
    const double N = double(x.size());
    const double r2 = sigma * sigma * cfg.D;
    w.assign(K, 0.0);
    std::vector<double> lw(K);
    for (std::size_t k = 0; k < K; ++k) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.v.size(); ++i) {
            const double diff = x.v[i] - data.items[k].v[i];
            d2 += diff * diff;
        }
        if (gaussian_limit) {
            if (sigma == 0.0) {
                if (d2 == 0.0) return static_cast<int>(k);
                lw[k] = -1.0e300; // unreachable mass; handled by exact-hit rule
            } else {
                lw[k] = -d2 / (2.0 * sigma * sigma);
            }
        } else {
            if (d2 + r2 == 0.0) return static_cast<int>(k);
            lw[k] = -0.5 * (N + cfg.D) * std::log(d2 + r2);
        }
    }
    // sigma == 0 without an exact hit: nearest neighbor wins through the
    // log weights in the heavy-tailed branch; in the Gaussian branch all
    // logs are the sentinel, so fall back to nearest by distance.
    if (gaussian_limit && sigma == 0.0) {
        std::size_t best = 0;
        double bd = 1.0e300;
        for (std::size_t k = 0; k < K; ++k) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < x.v.size(); ++i) {
                const double diff = x.v[i] - data.items[k].v[i];
                d2 += diff * diff;
            }
            if (d2 < bd) {
                bd = d2;
                best = k;
            }
        }
        return static_cast<int>(best);
    }

    double mx = lw[0];
    for (double l : lw) mx = std::max(mx, l);
    double tot = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        w[k] = std::exp(lw[k] - mx);
        tot += w[k];
    }
    for (double& wk : w) wk /= tot;
    return -1;
}

} // namespace detail

// Closed-form posterior mean over a finite dataset. Exact oracle for the
// generative components: no training involved.
struct AnalyticDenoiser : Denoiser {
    DiscreteDataset data;
    PfgmConfig cfg;
    bool gaussian_limit = false;

    AnalyticDenoiser() = default;
    AnalyticDenoiser(DiscreteDataset d, const PfgmConfig& c, bool gauss = false)
        : data(std::move(d)), cfg(c), gaussian_limit(gauss) {
        data.validate();
        cfg.validate();
    }

    Image denoise(const Image& x, double sigma) const override {
        std::vector<double> w;
        const int hit = detail::posterior_weights(data, x, sigma, cfg, gaussian_limit, w);
        if (hit >= 0) return data.items[std::size_t(hit)];
        Image out(x.grid, 0.0);
        for (std::size_t k = 0; k < data.items.size(); ++k)
            if (w[k] != 0.0) axpy(out, w[k], data.items[k]);
        return out;
    }
};

// Normalized attraction field of the augmented electrostatics: the weighted
// mean of (x - y_k) under the same posterior weights. Antiparallel to the
// denoising direction f(x, sigma) - x by construction.
inline Image poisson_field(const DiscreteDataset& data, const Image& x, double sigma,
                           const PfgmConfig& cfg) {
    std::vector<double> w;
    const int hit = detail::posterior_weights(data, x, sigma, cfg, false, w);
    Image field(x.grid, 0.0);
    if (hit >= 0) {
        for (std::size_t i = 0; i < x.v.size(); ++i)
            field.v[i] = x.v[i] - data.items[std::size_t(hit)].v[i];
        return field;
    }
    for (std::size_t k = 0; k < data.items.size(); ++k) {
        if (w[k] == 0.0) continue;
        const Image& y = data.items[k];
        for (std::size_t i = 0; i < x.v.size(); ++i) field.v[i] += w[k] * (x.v[i] - y.v[i]);
    }
    return field;
}

// Stein score of the smoothed density, expressed through the denoiser.
inline Image score(const Denoiser& den, const Image& x, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("score: sigma must be > 0");
    Image s = den.denoise(x, sigma) - x;
    const double inv = 1.0 / (sigma * sigma);
    for (double& v : s.v) v *= inv;
    return s;
}

} // namespace force
