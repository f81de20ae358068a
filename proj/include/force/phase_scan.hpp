#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "force/image.hpp"

namespace force {

namespace detail {

// Cyclic Jacobi eigendecomposition of a symmetric matrix (row-major).
// Returns eigenvalues; V (if given) receives eigenvectors by column.
inline std::vector<double> jacobi_eigen(std::vector<double> A, int n,
                                        std::vector<double>* V = nullptr) {
    if (V) {
        V->assign(std::size_t(n) * n, 0.0);
        for (int i = 0; i < n; ++i) (*V)[std::size_t(i) * n + i] = 1.0;
    }
    auto a = [&](int i, int j) -> double& { return A[std::size_t(i) * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1.0e-24) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                if (V) {
                    for (int k = 0; k < n; ++k) {
                        const double vp = (*V)[std::size_t(k) * n + p];
                        const double vq = (*V)[std::size_t(k) * n + q];
                        (*V)[std::size_t(k) * n + p] = c * vp - s * vq;
                        (*V)[std::size_t(k) * n + q] = s * vp + c * vq;
                    }
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a(i, i);
    return ev;
}

// B = A^(1/2) for symmetric positive semidefinite A, with eigenvalues
// floored at eig_floor first.
inline std::vector<double> spd_sqrt(const std::vector<double>& A, int n, double eig_floor) {
    std::vector<double> V;
    std::vector<double> ev = jacobi_eigen(A, n, &V);
    for (double& e : ev) e = std::sqrt(std::max(e, eig_floor));
    std::vector<double> B(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k)
                acc += V[std::size_t(i) * n + k] * ev[std::size_t(k)] * V[std::size_t(j) * n + k];
            B[std::size_t(i) * n + j] = acc;
        }
    return B;
}

inline std::vector<double> matmul(const std::vector<double>& A, const std::vector<double>& B,
                                  int n) {
    std::vector<double> C(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = A[std::size_t(i) * n + k];
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) C[std::size_t(i) * n + j] += aik * B[std::size_t(k) * n + j];
        }
    return C;
}

} // namespace detail

// First and second moments of the non-overlapping patch population.
struct MomentSummary {
    int dim = 0;
    std::vector<double> mean;
    std::vector<double> cov; // population covariance, row-major dim x dim
};

inline MomentSummary patch_moments(const std::vector<Image>& images, int patch = 4) {
    if (images.empty()) throw std::invalid_argument("patch_moments: no images");
    if (patch < 1) throw std::invalid_argument("patch_moments: patch must be >= 1");
    const int dim = patch * patch;
    MomentSummary m;
    m.dim = dim;
    m.mean.assign(dim, 0.0);
    m.cov.assign(std::size_t(dim) * dim, 0.0);

    std::size_t count = 0;
    std::vector<double> feat(dim);
    for (const Image& im : images) {
        im.validate();
        if (im.grid.n < patch) throw std::invalid_argument("patch_moments: image smaller than patch");
        const int np = im.grid.n / patch;
        for (int pi = 0; pi < np; ++pi) {
            for (int pj = 0; pj < np; ++pj) {
                for (int i = 0; i < patch; ++i)
                    for (int j = 0; j < patch; ++j)
                        feat[std::size_t(i) * patch + j] = im.at(pi * patch + i, pj * patch + j);
                for (int i = 0; i < dim; ++i) {
                    m.mean[std::size_t(i)] += feat[std::size_t(i)];
                    for (int j = 0; j < dim; ++j)
                        m.cov[std::size_t(i) * dim + j] += feat[std::size_t(i)] * feat[std::size_t(j)];
                }
                ++count;
            }
        }
    }
    for (double& v : m.mean) v /= double(count);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            m.cov[std::size_t(i) * dim + j] =
                m.cov[std::size_t(i) * dim + j] / double(count) - m.mean[std::size_t(i)] * m.mean[std::size_t(j)];
    return m;
}

// Squared Frechet distance between the two Gaussian summaries:
//   ||mu1 - mu2||^2 + tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2)
// Eigenvalues are floored so near-singular patch covariances stay stable;
// the result is clamped at zero.
inline double frechet_gaussian2(const MomentSummary& a, const MomentSummary& b,
                                double eig_floor = 1.0e-10) {
    if (a.dim != b.dim || a.dim < 1) throw std::invalid_argument("frechet_gaussian2: dim mismatch");
    const int n = a.dim;

    double mu = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = a.mean[std::size_t(i)] - b.mean[std::size_t(i)];
        mu += d * d;
    }

    // floor both covariances through their eigensystems
    auto floor_cov = [&](const std::vector<double>& S) {
        std::vector<double> V;
        std::vector<double> ev = detail::jacobi_eigen(S, n, &V);
        std::vector<double> out(std::size_t(n) * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k)
                    acc += V[std::size_t(i) * n + k] * std::max(ev[std::size_t(k)], eig_floor) *
                           V[std::size_t(j) * n + k];
                out[std::size_t(i) * n + j] = acc;
            }
        return out;
    };
    const std::vector<double> S1 = floor_cov(a.cov);
    const std::vector<double> S2 = floor_cov(b.cov);

    double tr12 = 0.0;
    for (int i = 0; i < n; ++i)
        tr12 += S1[std::size_t(i) * n + i] + S2[std::size_t(i) * n + i];

    const std::vector<double> R = detail::spd_sqrt(S1, n, eig_floor);
    const std::vector<double> M = detail::matmul(detail::matmul(R, S2, n), R, n);
    std::vector<double> ev = detail::jacobi_eigen(M, n, nullptr);
    double cross = 0.0;
    for (double e : ev) cross += std::sqrt(std::max(e, 0.0));

    return std::max(0.0, mu + tr12 - 2.0 * cross);
}

struct PhasePoint {
    double sigma = 0.0;
    double distance2 = 0.0;
};

// Perturbs both populations with the same Gaussian level and tracks how the
// patch statistics of the corrupted set approach the clean set: flat and
// high while artifacts dominate, decaying once noise starts to mask them,
// near the floor when noise dominates everything.
//
// The k-th image of each set receives the identical noise field (common
// random numbers), so the finite-sample error of the noise moments cancels
// between the two summaries instead of swamping the artifact signal, and
// the self-distance phase_scan(S, S, ...) is exactly zero.
inline std::vector<PhasePoint> phase_scan(const std::vector<Image>& corrupted,
                                          const std::vector<Image>& clean,
                                          const std::vector<double>& sigmas, std::uint64_t seed,
                                          int patch = 4) {
    if (corrupted.empty() || clean.empty()) throw std::invalid_argument("phase_scan: empty set");
    for (double s : sigmas)
        if (!(s >= 0.0)) throw std::invalid_argument("phase_scan: sigma must be >= 0");

    std::vector<PhasePoint> out;
    out.reserve(sigmas.size());
    std::uint64_t salt = seed;
    auto noisy = [&](const std::vector<Image>& set, double s) {
        std::vector<Image> res = set;
        if (s > 0.0)
            for (std::size_t k = 0; k < res.size(); ++k) {
                std::mt19937_64 rng(salt + 0x9e3779b97f4a7c15ULL * (k + 1));
                std::normal_distribution<double> nd(0.0, 1.0);
                for (double& v : res[k].v) v += s * nd(rng);
            }
        return res;
    };
    for (double s : sigmas) {
        const MomentSummary mc = patch_moments(noisy(corrupted, s), patch);
        const MomentSummary mk = patch_moments(noisy(clean, s), patch);
        out.push_back({s, frechet_gaussian2(mc, mk)});
        salt = salt * 6364136223846793005ULL + 1442695040888963407ULL;
    }
    return out;
}

} // namespace force
