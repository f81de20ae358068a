#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "force/denoiser.hpp"
#include "force/image.hpp"
#include "force/pfgm.hpp"

namespace force {

// sigma-dependent input/output scalings; sigma_data balances the skip path
// against the learned path.
struct EdmCoeffs {
    double c_skip, c_out, c_in, c_noise;
};

inline EdmCoeffs edm_coeffs(double sigma, double sigma_data) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("edm_coeffs: sigma must be >= 0");
    if (!(sigma_data > 0.0)) throw std::invalid_argument("edm_coeffs: sigma_data must be > 0");
    const double s2 = sigma * sigma;
    const double d2 = sigma_data * sigma_data;
    EdmCoeffs c;
    c.c_skip = d2 / (s2 + d2);
    c.c_out = sigma * sigma_data / std::sqrt(s2 + d2);
    c.c_in = 1.0 / std::sqrt(s2 + d2);
    c.c_noise = 0.25 * std::log(std::max(sigma, 1.0e-300));
    return c;
}

struct LinearLayer {
    int in = 0, out = 0;
    std::vector<double> W; // row-major, out x in
    std::vector<double> b;
};

// Small dense net mapping [c_in * x, c_noise] (N+1 values) to an N-vector.
// tanh hidden activations, linear output.
struct ToyNet {
    int n_pixels = 0;
    std::vector<LinearLayer> layers;

    void validate() const {
        if (n_pixels < 1) throw std::invalid_argument("ToyNet: n_pixels must be >= 1");
        if (layers.empty()) throw std::invalid_argument("ToyNet: no layers");
        if (layers.front().in != n_pixels + 1)
            throw std::invalid_argument("ToyNet: first layer must take n_pixels + 1 inputs");
        if (layers.back().out != n_pixels)
            throw std::invalid_argument("ToyNet: last layer must emit n_pixels outputs");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const LinearLayer& L = layers[l];
            if (L.W.size() != std::size_t(L.in) * L.out || L.b.size() != std::size_t(L.out))
                throw std::invalid_argument("ToyNet: layer buffer size mismatch");
            if (l > 0 && layers[l - 1].out != L.in)
                throw std::invalid_argument("ToyNet: layer widths do not chain");
        }
    }
};

inline ToyNet make_toynet(int n_pixels, const std::vector<int>& hidden, std::uint64_t seed) {
    if (n_pixels < 1) throw std::invalid_argument("make_toynet: n_pixels must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    ToyNet net;
    net.n_pixels = n_pixels;
    std::vector<int> widths;
    widths.push_back(n_pixels + 1);
    for (int h : hidden) {
        if (h < 1) throw std::invalid_argument("make_toynet: hidden width must be >= 1");
        widths.push_back(h);
    }
    widths.push_back(n_pixels);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        LinearLayer L;
        L.in = widths[l];
        L.out = widths[l + 1];
        L.W.resize(std::size_t(L.in) * L.out);
        L.b.assign(std::size_t(L.out), 0.0);
        const double scale = std::sqrt(1.0 / double(L.in));
        for (double& w : L.W) w = scale * nd(rng);
        net.layers.push_back(std::move(L));
    }
    return net;
}

namespace detail {

// Forward pass on the raw network; records post-activation vectors when a
// trace is supplied (needed for backprop).
inline std::vector<double> toynet_raw(const ToyNet& net, const std::vector<double>& input,
                                      std::vector<std::vector<double>>* trace = nullptr) {
    std::vector<double> cur = input;
    if (trace) trace->push_back(cur);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LinearLayer& L = net.layers[l];
        std::vector<double> nxt(L.out);
        for (int o = 0; o < L.out; ++o) {
            double acc = L.b[o];
            const double* wr = &L.W[std::size_t(o) * L.in];
            for (int i = 0; i < L.in; ++i) acc += wr[i] * cur[i];
            nxt[o] = acc;
        }
        if (l + 1 < net.layers.size())
            for (double& v : nxt) v = std::tanh(v);
        cur = std::move(nxt);
        if (trace) trace->push_back(cur);
    }
    return cur;
}

} // namespace detail

// Preconditioned evaluation: f(x, sigma) = c_skip * x + c_out * F(...).
inline Image toynet_denoise(const ToyNet& net, const Image& x, double sigma,
                            const PfgmConfig& cfg) {
    net.validate();
    x.validate();
    if (int(x.size()) != net.n_pixels)
        throw std::invalid_argument("toynet_denoise: image size does not match the net");
    const EdmCoeffs c = edm_coeffs(sigma, cfg.sigma_data);
    std::vector<double> input(net.n_pixels + 1);
    for (int i = 0; i < net.n_pixels; ++i) input[i] = c.c_in * x.v[i];
    input[net.n_pixels] = c.c_noise;
    const std::vector<double> raw = detail::toynet_raw(net, input);
    Image out = x;
    for (int i = 0; i < net.n_pixels; ++i) out.v[i] = c.c_skip * x.v[i] + c.c_out * raw[i];
    return out;
}

struct ToyNetDenoiser : Denoiser {
    ToyNet net;
    PfgmConfig cfg;

    ToyNetDenoiser() = default;
    ToyNetDenoiser(ToyNet n, const PfgmConfig& c) : net(std::move(n)), cfg(c) {}

    Image denoise(const Image& x, double sigma) const override {
        return toynet_denoise(net, x, sigma, cfg);
    }
};

struct TrainSample {
    Image clean;
    Image perturbed;
    double sigma = 0.0;
};

// Randomness of one training step, isolated so the gradient path stays
// deterministic given the sample.
inline TrainSample draw_train_sample(const std::vector<Image>& data, const PfgmConfig& cfg,
                                     std::mt19937_64& rng) {
    if (data.empty()) throw std::invalid_argument("draw_train_sample: empty dataset");
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    TrainSample s;
    s.clean = data[pick(rng)];
    s.sigma = sample_sigma(cfg, rng);
    s.perturbed = perturb(s.clean, s.sigma, cfg, rng);
    return s;
}

using ToyNetGrad = std::vector<LinearLayer>;

// Weighted denoising loss 1/c_out^2 * ||f(perturbed, sigma) - clean||^2 and
// its gradient with respect to every weight and bias.
inline double loss_and_grad(const ToyNet& net, const TrainSample& s, const PfgmConfig& cfg,
                            ToyNetGrad& grad) {
    net.validate();
    if (int(s.clean.size()) != net.n_pixels || int(s.perturbed.size()) != net.n_pixels)
        throw std::invalid_argument("loss_and_grad: sample size does not match the net");
    const EdmCoeffs c = edm_coeffs(s.sigma, cfg.sigma_data);

    std::vector<double> input(net.n_pixels + 1);
    for (int i = 0; i < net.n_pixels; ++i) input[i] = c.c_in * s.perturbed.v[i];
    input[net.n_pixels] = c.c_noise;

    std::vector<std::vector<double>> acts;
    const std::vector<double> raw = detail::toynet_raw(net, input, &acts);

    double loss = 0.0;
    std::vector<double> delta(net.n_pixels); // dL/d raw
    const double w = 1.0 / (c.c_out * c.c_out);
    for (int i = 0; i < net.n_pixels; ++i) {
        const double f = c.c_skip * s.perturbed.v[i] + c.c_out * raw[i];
        const double e = f - s.clean.v[i];
        loss += w * e * e;
        delta[i] = 2.0 * e / c.c_out; // w * 2e * c_out
    }

    grad.clear();
    grad.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        grad[l].in = net.layers[l].in;
        grad[l].out = net.layers[l].out;
        grad[l].W.assign(net.layers[l].W.size(), 0.0);
        grad[l].b.assign(net.layers[l].b.size(), 0.0);
    }
    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const LinearLayer& L = net.layers[l];
        const std::vector<double>& zin = acts[l];
        for (int o = 0; o < L.out; ++o) {
            grad[l].b[o] = delta[o];
            double* gw = &grad[l].W[std::size_t(o) * L.in];
            for (int i = 0; i < L.in; ++i) gw[i] = delta[o] * zin[i];
        }
        if (l == 0) break;
        std::vector<double> prev(L.in, 0.0);
        for (int o = 0; o < L.out; ++o) {
            const double* wr = &L.W[std::size_t(o) * L.in];
            for (int i = 0; i < L.in; ++i) prev[i] += wr[i] * delta[o];
        }
        // activation derivative: acts[l] holds tanh(a) for hidden layers
        for (int i = 0; i < L.in; ++i) prev[i] *= 1.0 - zin[i] * zin[i];
        delta = std::move(prev);
    }
    return loss;
}

// One SGD step on a freshly drawn sample; returns that sample's loss.
inline double train_step(ToyNet& net, const std::vector<Image>& data, const PfgmConfig& cfg,
                         std::mt19937_64& rng, double lr) {
    if (!(lr > 0.0)) throw std::invalid_argument("train_step: lr must be > 0");
    const TrainSample s = draw_train_sample(data, cfg, rng);
    ToyNetGrad g;
    const double loss = loss_and_grad(net, s, cfg, g);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        LinearLayer& L = net.layers[l];
        for (std::size_t k = 0; k < L.W.size(); ++k) L.W[k] -= lr * g[l].W[k];
        for (std::size_t k = 0; k < L.b.size(); ++k) L.b[k] -= lr * g[l].b[k];
    }
    return loss;
}

} // namespace force
