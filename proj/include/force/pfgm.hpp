#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "force/image.hpp"

namespace force {

// Shared knobs of the augmented-dimension prior. D counts the extra
// dimensions; D -> infinity recovers the Gaussian diffusion limit with the
// identification r = sigma * sqrt(D).
struct PfgmConfig {
    double D = 128.0;
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    double rho = 7.0;       // time-step schedule exponent
    double p_mean = -1.2;   // log-mean of the training noise distribution
    double p_std = 1.2;     // log-std of the training noise distribution
    double sigma_data = 0.5;

    void validate() const {
        if (!(D >= 1.0)) throw std::invalid_argument("PfgmConfig: D must be >= 1");
        if (!(sigma_min > 0.0) || !(sigma_max > sigma_min))
            throw std::invalid_argument("PfgmConfig: need 0 < sigma_min < sigma_max");
        if (!(rho >= 1.0)) throw std::invalid_argument("PfgmConfig: rho must be >= 1");
        if (!(p_std >= 0.0)) throw std::invalid_argument("PfgmConfig: p_std must be >= 0");
        if (!(sigma_data > 0.0)) throw std::invalid_argument("PfgmConfig: sigma_data must be > 0");
    }
};

// Training noise level: ln sigma ~ Normal(p_mean, p_std^2).
inline double sample_sigma(const PfgmConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    if (cfg.p_std == 0.0) return std::exp(cfg.p_mean);
    std::normal_distribution<double> nd(cfg.p_mean, cfg.p_std);
    return std::exp(nd(rng));
}

// Perturbation radius given the Beta(N/2, D/2) draw. beta = 1/2 gives
// exactly sigma * sqrt(D); this is the deterministic core of sample_radius.
inline double radius_from_beta(double sigma, const PfgmConfig& cfg, double beta) {
    cfg.validate();
    if (!(sigma >= 0.0)) throw std::invalid_argument("radius_from_beta: sigma must be >= 0");
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("radius_from_beta: beta must be in (0, 1)");
    return sigma * std::sqrt(cfg.D) * std::sqrt(beta / (1.0 - beta));
}

// Radius of the augmented perturbation shell for an N-pixel image. Uses two
// gamma draws, g1 ~ Gamma(N/2), g2 ~ Gamma(D/2), so that g1/(g1+g2) is the
// Beta(N/2, D/2) variable of the kernel. E[R] approaches sigma * sqrt(N) in
// the large-D limit.
inline double sample_radius(double sigma, std::size_t n_pixels, const PfgmConfig& cfg,
                            std::mt19937_64& rng) {
    cfg.validate();
    if (n_pixels == 0) throw std::invalid_argument("sample_radius: n_pixels must be > 0");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sample_radius: sigma must be >= 0");
    if (sigma == 0.0) return 0.0;
    std::gamma_distribution<double> g1(0.5 * double(n_pixels), 1.0);
    std::gamma_distribution<double> g2(0.5 * cfg.D, 1.0);
    const double a = g1(rng);
    const double b = g2(rng);
    return sigma * std::sqrt(cfg.D) * std::sqrt(a / b);
}

struct PerturbDraw {
    Image x;       // y + R * v with v uniform on the unit sphere
    double radius; // the drawn R
};

inline PerturbDraw perturb_sample(const Image& y, double sigma, const PfgmConfig& cfg,
                                  std::mt19937_64& rng) {
    y.validate();
    const double R = sample_radius(sigma, y.size(), cfg, rng);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> u(y.size());
    double nrm2 = 0.0;
    do {
        nrm2 = 0.0;
        for (double& c : u) {
            c = nd(rng);
            nrm2 += c * c;
        }
    } while (nrm2 == 0.0);
    const double scale = R / std::sqrt(nrm2);
    PerturbDraw out;
    out.radius = R;
    out.x = y;
    for (std::size_t k = 0; k < u.size(); ++k) out.x.v[k] += scale * u[k];
    return out;
}

inline Image perturb(const Image& y, double sigma, const PfgmConfig& cfg, std::mt19937_64& rng) {
    return perturb_sample(y, sigma, cfg, rng).x;
}

} // namespace force
