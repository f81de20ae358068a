#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <variant>

#include "force/cg.hpp"
#include "force/denoiser.hpp"
#include "force/fbp.hpp"
#include "force/geometry.hpp"
#include "force/image.hpp"
#include "force/mar.hpp"
#include "force/pfgm.hpp"
#include "force/projector.hpp"
#include "force/sart.hpp"
#include "force/schedule.hpp"
#include "force/tv.hpp"

namespace force {

// Physics-consistency step applied before each denoiser call.

struct NoConditioning {};

struct RedConditioning {
    RedConfig red;
};

struct OsSartConditioning {
    OsSartConfig sart;
};

// Substitutes the metal trace from a tissue-class prior of the current
// sample and reconstructs the corrected sinogram.
struct MarConditioning {
    TraceMask trace;
    SegThresholds thresholds;
    FilterSpec filter;
};

using ConditioningSpec =
    std::variant<NoConditioning, RedConditioning, OsSartConditioning, MarConditioning>;

inline Image condition(const Image& x, const Sinogram& sino, const ConditioningSpec& spec) {
    if (std::holds_alternative<NoConditioning>(spec)) return x;
    if (const auto* red = std::get_if<RedConditioning>(&spec))
        return red_condition(x, sino, red->red);
    if (const auto* sart = std::get_if<OsSartConditioning>(&spec))
        return os_sart(sino, x.grid, x, sart->sart);
    const auto& mar = std::get<MarConditioning>(spec);
    return fbp(sinogram_substitute(x, sino, mar.trace, mar.thresholds), x.grid, mar.filter);
}

// Norm convention of the starting perturbation. The augmented geometry puts
// the sample on the radius sigma0*sqrt(D) shell; the diffusion limit would
// use sigma0*sqrt(N) instead.
enum class InitNorm { augmented_shell, gaussian_match };

inline Image init_sample(const Image& x_init, double sigma0, const PfgmConfig& cfg,
                         std::mt19937_64& rng, InitNorm norm = InitNorm::augmented_shell) {
    x_init.validate();
    cfg.validate();
    if (!(sigma0 >= 0.0)) throw std::invalid_argument("init_sample: sigma0 must be >= 0");
    if (sigma0 == 0.0) return x_init;
    const double r0 = sigma0 * std::sqrt(norm == InitNorm::augmented_shell ? cfg.D
                                                                           : double(x_init.size()));
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> u(x_init.size());
    double nrm2 = 0.0;
    do {
        nrm2 = 0.0;
        for (double& c : u) {
            c = nd(rng);
            nrm2 += c * c;
        }
    } while (nrm2 == 0.0);
    const double scale = r0 / std::sqrt(nrm2);
    Image out = x_init;
    for (std::size_t k = 0; k < u.size(); ++k) out.v[k] += scale * u[k];
    return out;
}

// Nesterov-style extrapolation bookkeeping across sampler steps.
struct MomentumState {
    double xi = 1.0;
    std::optional<Image> prev; // last un-extrapolated denoised sample
};

struct MomentumCoeff {
    double xi_next;
    double coeff;
};

inline MomentumCoeff momentum_coeff(double xi_prev) {
    if (!(xi_prev >= 1.0)) throw std::invalid_argument("momentum_coeff: xi must be >= 1");
    MomentumCoeff m;
    m.xi_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * xi_prev * xi_prev));
    m.coeff = (xi_prev - 1.0) / m.xi_next;
    return m;
}

struct SamplerConfig {
    int T = 25;
    double sigma_start = 0.0; // 0 picks 0.4 * sigma_max
    double lambda_tv = 0.0;   // 0 disables the TV proximal step
    int tv_iters = 30;
    bool momentum = true;
    InitNorm init_norm = InitNorm::augmented_shell;
    std::uint64_t seed = 0;
};

// One iteration: conditioning, denoise, TV proximal step, momentum
// extrapolation, then the probability-flow Euler move from sigma to
// sigma_next. sigma_next == 0 returns the extrapolated denoised sample.
inline Image force_step(const Image& x, double sigma, double sigma_next, const Sinogram& sino,
                        const ConditioningSpec& spec, const Denoiser& den,
                        const SamplerConfig& cfg, MomentumState& state) {
    if (!(sigma > 0.0)) throw std::invalid_argument("force_step: sigma must be > 0");
    if (!(sigma_next >= 0.0)) throw std::invalid_argument("force_step: sigma_next must be >= 0");

    const Image xbar = condition(x, sino, spec);
    Image xhat = den.denoise(xbar, sigma);
    if (cfg.lambda_tv > 0.0) xhat = tv_denoise(xhat, cfg.lambda_tv, cfg.tv_iters);
    if (!all_finite(xhat.v)) throw NumericalError("force_step: denoised sample is non-finite");

    if (cfg.momentum) {
        const MomentumCoeff m = momentum_coeff(state.xi);
        Image raw = xhat;
        if (state.prev && m.coeff != 0.0) axpy(xhat, m.coeff, raw - *state.prev);
        state.prev = std::move(raw);
        state.xi = m.xi_next;
    }

    if (sigma_next == 0.0) return xhat;
    // x + (sigma_next - sigma) * (x - xhat) / sigma
    Image out = x;
    const double f = (sigma_next - sigma) / sigma;
    axpy(out, f, x - xhat);
    return out;
}

enum class DegradationTask { none, low_dose, sparse_view, metal };

// Picks the conditioning the task calls for: regularized least squares for
// low dose, ordered subsets for sparse views, trace substitution for metal.
inline ConditioningSpec default_conditioning(DegradationTask task, const TraceMask* trace = nullptr) {
    switch (task) {
        case DegradationTask::low_dose: {
            RedConditioning r;
            return r;
        }
        case DegradationTask::sparse_view: {
            OsSartConditioning s;
            return s;
        }
        case DegradationTask::metal: {
            if (trace == nullptr)
                throw std::invalid_argument("default_conditioning: metal task needs a trace");
            MarConditioning m;
            m.trace = *trace;
            return m;
        }
        default:
            return NoConditioning{};
    }
}

// Full reconstruction loop. The chain starts from a filtered
// back-projection (of the interpolation-repaired sinogram when a metal
// trace is present) plus the initial shell perturbation, then runs T
// conditioned denoising steps down the schedule. diag, when given,
// receives one CSV row per step.
inline Image force_reconstruct(const Sinogram& sino, const ImageGrid& grid,
                               const ConditioningSpec& spec, const Denoiser& den,
                               const PfgmConfig& pf, const SamplerConfig& cfg,
                               std::ostream* diag = nullptr) {
    sino.validate();
    grid.validate();
    pf.validate();
    if (cfg.T < 1) throw std::invalid_argument("force_reconstruct: T must be >= 1");

    const double sigma_start = cfg.sigma_start > 0.0 ? cfg.sigma_start : 0.4 * pf.sigma_max;
    const std::vector<double> sched = make_schedule(sigma_start, pf.sigma_min, cfg.T, pf.rho);

    Image x_init;
    if (const auto* mar = std::get_if<MarConditioning>(&spec))
        x_init = fbp(li_mar(sino, mar->trace), grid, mar->filter);
    else
        x_init = fbp(sino, grid);

    std::mt19937_64 rng(cfg.seed);
    Image x = init_sample(x_init, sched[0], pf, rng, cfg.init_norm);

    if (diag) *diag << "step,sigma,data_residual,tv\n";
    const double pnorm = norm2(sino);
    MomentumState state;
    for (int i = 0; i < cfg.T; ++i) {
        x = force_step(x, sched[std::size_t(i)], sched[std::size_t(i) + 1], sino, spec, den, cfg,
                       state);
        if (diag) {
            Sinogram hx = forward_project(x, sino.geo);
            double rnum = 0.0;
            for (std::size_t k = 0; k < hx.v.size(); ++k) {
                const double d = hx.v[k] - sino.v[k];
                rnum += d * d;
            }
            *diag << i << ',' << sched[std::size_t(i)] << ','
                  << (pnorm > 0.0 ? std::sqrt(rnum) / pnorm : std::sqrt(rnum)) << ','
                  << tv_value(x) << '\n';
        }
    }
    return x;
}

} // namespace force
