#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace force {

// Noise-level ladder with the rho-warped spacing; entry T is exactly zero
// so the final step lands on the denoised sample. T >= 2 interpolates
// sigma_start down to sigma_min over T levels.
inline std::vector<double> make_schedule(double sigma_start, double sigma_min, int T, double rho) {
    if (T < 1) throw std::invalid_argument("make_schedule: T must be >= 1");
    if (!(sigma_min > 0.0) || !(sigma_start >= sigma_min))
        throw std::invalid_argument("make_schedule: need sigma_start >= sigma_min > 0");
    if (!(rho > 0.0)) throw std::invalid_argument("make_schedule: rho must be > 0");

    std::vector<double> s(std::size_t(T) + 1, 0.0);
    if (T == 1) {
        s[0] = sigma_start;
        return s;
    }
    const double a = std::pow(sigma_start, 1.0 / rho);
    const double b = std::pow(sigma_min, 1.0 / rho);
    for (int i = 0; i < T; ++i) {
        const double t = double(i) / double(T - 1);
        s[std::size_t(i)] = std::pow(a + t * (b - a), rho);
    }
    s[0] = sigma_start;    // guard the endpoints against pow round-trip error
    s[std::size_t(T) - 1] = sigma_min;
    return s;
}

} // namespace force
