#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "force/image.hpp"

namespace force {

inline double rmse(const Image& x, const Image& ref) {
    check_same_shape(x, ref, "rmse");
    double acc = 0.0;
    for (std::size_t k = 0; k < x.v.size(); ++k) {
        const double d = x.v[k] - ref.v[k];
        acc += d * d;
    }
    return std::sqrt(acc / double(x.v.size()));
}

// 10 log10(range^2 / mse); identical images give +infinity.
inline double psnr(const Image& x, const Image& ref, double data_range = 1.0) {
    check_same_shape(x, ref, "psnr");
    if (!(data_range > 0.0)) throw std::invalid_argument("psnr: data_range must be > 0");
    double mse = 0.0;
    for (std::size_t k = 0; k < x.v.size(); ++k) {
        const double d = x.v[k] - ref.v[k];
        mse += d * d;
    }
    mse /= double(x.v.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(data_range * data_range / mse);
}

// Mean structural similarity over non-overlapping square windows; trailing
// rows/columns that do not fill a window are ignored.
inline double ssim(const Image& x, const Image& ref, double data_range = 1.0, int window = 8,
                   double k1 = 0.01, double k2 = 0.03) {
    check_same_shape(x, ref, "ssim");
    if (!(data_range > 0.0)) throw std::invalid_argument("ssim: data_range must be > 0");
    if (window < 1 || window > x.grid.n) throw std::invalid_argument("ssim: bad window");

    const double C1 = (k1 * data_range) * (k1 * data_range);
    const double C2 = (k2 * data_range) * (k2 * data_range);
    const int n = x.grid.n;
    const int nw = n / window;
    const double cnt = double(window) * window;

    double total = 0.0;
    int used = 0;
    for (int wi = 0; wi < nw; ++wi) {
        for (int wj = 0; wj < nw; ++wj) {
            double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            for (int i = wi * window; i < (wi + 1) * window; ++i) {
                for (int j = wj * window; j < (wj + 1) * window; ++j) {
                    const double a = x.at(i, j);
                    const double b = ref.at(i, j);
                    sx += a;
                    sy += b;
                    sxx += a * a;
                    syy += b * b;
                    sxy += a * b;
                }
            }
            const double mx = sx / cnt;
            const double my = sy / cnt;
            const double vx = sxx / cnt - mx * mx;
            const double vy = syy / cnt - my * my;
            const double cxy = sxy / cnt - mx * my;
            const double val = ((2.0 * mx * my + C1) * (2.0 * cxy + C2)) /
                               ((mx * mx + my * my + C1) * (vx + vy + C2));
            total += val;
            ++used;
        }
    }
    return total / double(used);
}

struct MetricReport {
    double psnr_db = 0.0;
    double ssim_val = 0.0;
    double rmse_val = 0.0;
};

inline MetricReport evaluate_pair(const Image& x, const Image& ref, double data_range = 1.0) {
    MetricReport r;
    r.psnr_db = psnr(x, ref, data_range);
    r.ssim_val = ssim(x, ref, data_range);
    r.rmse_val = rmse(x, ref);
    return r;
}

} // namespace force
