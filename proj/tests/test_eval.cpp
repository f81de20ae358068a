#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "force/degrade.hpp"
#include "force/fbp.hpp"
#include "force/metrics.hpp"
#include "force/phantom.hpp"
#include "force/phase_scan.hpp"
#include "force/projector.hpp"

namespace {

using namespace force;

ImageGrid unit_grid(int n) { return ImageGrid{n, 2.0 / n}; }

Image random_image(const ImageGrid& g, std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Image img(g);
    for (double& v : img.v) v = u(rng);
    return img;
}

Image noise_field(const ImageGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Image img(g);
    for (double& v : img.v) v = nd(rng);
    return img;
}

} // namespace

TEST_CASE("rmse and psnr agree with closed forms") {
    const ImageGrid g = unit_grid(32);
    const Image ref = random_image(g, 11, 0.0, 1.0);

    SECTION("identical images: rmse zero, psnr positive infinity") {
        CHECK(rmse(ref, ref) == 0.0);
        const double p = psnr(ref, ref);
        CHECK(std::isinf(p));
        CHECK(p > 0.0);
    }

    SECTION("constant offset of 0.1 gives exactly 20 dB at unit range") {
        Image x = ref;
        for (double& v : x.v) v += 0.1;
        CHECK(rmse(x, ref) == Catch::Approx(0.1).margin(1e-15));
        CHECK(psnr(x, ref) == Catch::Approx(20.0).margin(1e-12));
    }

    SECTION("four-pixel toy rmse") {
        const ImageGrid g2{2, 1.0};
        Image a(g2), b(g2);
        a.v = {3.0, 4.0, 0.0, 0.0};
        b.v = {0.0, 0.0, 0.0, 0.0};
        CHECK(rmse(a, b) == 2.5);
    }

    SECTION("symmetry") {
        const Image x = random_image(g, 12, 0.0, 1.0);
        CHECK(rmse(x, ref) == rmse(ref, x));
        CHECK(psnr(x, ref) == psnr(ref, x));
    }

    SECTION("doubling the data range adds 20 log10(2) dB") {
        const Image x = random_image(g, 13, 0.0, 1.0);
        CHECK(psnr(x, ref, 2.0) ==
              Catch::Approx(psnr(x, ref, 1.0) + 20.0 * std::log10(2.0)).margin(1e-12));
    }

    SECTION("psnr decreases as noise grows") {
        const Image nz = noise_field(g, 5);
        double prev = std::numeric_limits<double>::infinity();
        for (double amp : {0.01, 0.05, 0.25}) {
            Image x = ref;
            axpy(x, amp, nz);
            const double p = psnr(x, ref);
            CHECK(p < prev);
            prev = p;
        }
    }

    SECTION("validation") {
        const Image other{unit_grid(16)};
        CHECK_THROWS_AS(rmse(ref, other), std::invalid_argument);
        CHECK_THROWS_AS(psnr(ref, other), std::invalid_argument);
        CHECK_THROWS_AS(psnr(ref, ref, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(psnr(ref, ref, -1.0), std::invalid_argument);
    }
}

TEST_CASE("ssim matches structural expectations") {
    const ImageGrid g = unit_grid(32);
    const Image ref = random_image(g, 21, 0.0, 1.0);

    SECTION("self similarity is exactly one") { CHECK(ssim(ref, ref) == 1.0); }

    SECTION("inverted checkerboard is strongly anti-correlated") {
        const ImageGrid g16 = unit_grid(16);
        Image a(g16), b(g16);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) {
                const double v = double((i + j) % 2);
                a.at(i, j) = v;
                b.at(i, j) = 1.0 - v;
            }
        CHECK(ssim(a, b) < -0.99);
    }

    SECTION("trailing rows and columns that do not fill a window are ignored") {
        const ImageGrid g20 = unit_grid(20);
        Image a = random_image(g20, 22, 0.0, 1.0);
        Image b = a;
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j)
                if (i >= 16 || j >= 16) b.at(i, j) = a.at(i, j) + 5.0;
        CHECK(ssim(a, b) == 1.0);
    }

    SECTION("bounded in [-1, 1] on random pairs") {
        for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
            const Image x = random_image(g, seed, -1.0, 1.0);
            const Image y = random_image(g, seed + 100, -1.0, 1.0);
            const double s = ssim(x, y, 2.0);
            CHECK(s >= -1.0);
            CHECK(s <= 1.0);
        }
    }

    SECTION("more noise lowers ssim") {
        const Image base = shepp_logan(unit_grid(64));
        const Image nz = noise_field(unit_grid(64), 6);
        Image small = base, big = base;
        axpy(small, 0.05, nz);
        axpy(big, 0.2, nz);
        CHECK(ssim(big, base) < ssim(small, base));
        CHECK(ssim(small, base) < 1.0);
    }

    SECTION("validation") {
        const Image other{unit_grid(16)};
        CHECK_THROWS_AS(ssim(ref, other), std::invalid_argument);
        CHECK_THROWS_AS(ssim(ref, ref, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(ssim(ref, ref, 1.0, 0), std::invalid_argument);
        CHECK_THROWS_AS(ssim(ref, ref, 1.0, 33), std::invalid_argument);
    }
}

TEST_CASE("evaluate_pair bundles the individual metrics") {
    const ImageGrid g = unit_grid(32);
    const Image ref = random_image(g, 31, 0.0, 1.0);
    Image x = ref;
    axpy(x, 0.07, noise_field(g, 32));
    const MetricReport r = evaluate_pair(x, ref, 1.5);
    CHECK(r.psnr_db == psnr(x, ref, 1.5));
    CHECK(r.ssim_val == ssim(x, ref, 1.5));
    CHECK(r.rmse_val == rmse(x, ref));
}

TEST_CASE("patch_moments reproduces brute-force population statistics") {
    SECTION("single image, single patch: mean is the image, covariance vanishes") {
        const ImageGrid g4{4, 0.5};
        Image im(g4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) im.at(i, j) = double(i * 4 + j);
        const MomentSummary m = patch_moments({im}, 4);
        REQUIRE(m.dim == 16);
        for (int k = 0; k < 16; ++k) CHECK(m.mean[std::size_t(k)] == double(k));
        for (double c : m.cov) CHECK(c == 0.0);
    }

    SECTION("two 8x8 images against an independent recomputation") {
        const ImageGrid g8 = unit_grid(8);
        const std::vector<Image> set{random_image(g8, 41, -1.0, 2.0),
                                     random_image(g8, 42, 0.0, 1.0)};
        const int patch = 4, dim = 16;
        std::vector<std::vector<double>> feats;
        for (const Image& im : set)
            for (int pi = 0; pi < 2; ++pi)
                for (int pj = 0; pj < 2; ++pj) {
                    std::vector<double> f(dim);
                    for (int i = 0; i < patch; ++i)
                        for (int j = 0; j < patch; ++j)
                            f[std::size_t(i * patch + j)] = im.at(pi * patch + i, pj * patch + j);
                    feats.push_back(std::move(f));
                }
        REQUIRE(feats.size() == 8);
        std::vector<double> mean(dim, 0.0);
        for (const auto& f : feats)
            for (int i = 0; i < dim; ++i) mean[std::size_t(i)] += f[std::size_t(i)] / 8.0;
        std::vector<double> cov(std::size_t(dim) * dim, 0.0);
        for (const auto& f : feats)
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    cov[std::size_t(i) * dim + j] += (f[std::size_t(i)] - mean[std::size_t(i)]) *
                                                     (f[std::size_t(j)] - mean[std::size_t(j)]) / 8.0;

        const MomentSummary m = patch_moments(set, patch);
        REQUIRE(m.dim == dim);
        for (int i = 0; i < dim; ++i)
            CHECK(m.mean[std::size_t(i)] == Catch::Approx(mean[std::size_t(i)]).margin(1e-12));
        for (std::size_t k = 0; k < cov.size(); ++k)
            CHECK(m.cov[k] == Catch::Approx(cov[k]).margin(1e-12));
    }

    SECTION("trailing pixels that do not fill a patch are ignored") {
        const ImageGrid g10{10, 0.2};
        const ImageGrid g8{8, 0.2};
        Image big = random_image(g10, 43, 0.0, 1.0);
        Image crop(g8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) crop.at(i, j) = big.at(i, j);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j)
                if (i >= 8 || j >= 8) big.at(i, j) = 1e6;
        const MomentSummary a = patch_moments({big}, 4);
        const MomentSummary b = patch_moments({crop}, 4);
        REQUIRE(a.dim == b.dim);
        for (int i = 0; i < a.dim; ++i)
            CHECK(a.mean[std::size_t(i)] == b.mean[std::size_t(i)]);
        for (std::size_t k = 0; k < a.cov.size(); ++k) CHECK(a.cov[k] == b.cov[k]);
    }

    SECTION("validation") {
        const Image im = random_image(unit_grid(4), 44, 0.0, 1.0);
        CHECK_THROWS_AS(patch_moments({}, 4), std::invalid_argument);
        CHECK_THROWS_AS(patch_moments({im}, 0), std::invalid_argument);
        CHECK_THROWS_AS(patch_moments({im}, 5), std::invalid_argument);
    }
}

TEST_CASE("frechet_gaussian2 matches the diagonal closed form") {
    SECTION("hand-computed diagonal pair") {
        MomentSummary a, b;
        a.dim = b.dim = 3;
        a.mean = {0.0, 1.0, 2.0};
        b.mean = {1.0, 1.0, 0.0};
        a.cov = {1, 0, 0, 0, 4, 0, 0, 0, 9};
        b.cov = {4, 0, 0, 0, 1, 0, 0, 0, 1};
        // ||dmu||^2 = 1 + 0 + 4; trace term = (1+4-4) + (4+1-4) + (9+1-6) = 6
        CHECK(frechet_gaussian2(a, b) == Catch::Approx(11.0).margin(1e-12));
        CHECK(frechet_gaussian2(b, a) == Catch::Approx(11.0).margin(1e-12));
    }

    SECTION("zero covariances reduce to the squared mean gap") {
        MomentSummary a, b;
        a.dim = b.dim = 2;
        a.mean = {0.0, 0.0};
        b.mean = {3.0, 4.0};
        a.cov.assign(4, 0.0);
        b.cov.assign(4, 0.0);
        CHECK(frechet_gaussian2(a, b) == Catch::Approx(25.0).margin(1e-8));
    }

    SECTION("identical summaries are at distance zero") {
        const std::vector<Image> set{random_image(unit_grid(16), 51, 0.0, 1.0),
                                     random_image(unit_grid(16), 52, 0.0, 1.0)};
        const MomentSummary m = patch_moments(set, 4);
        CHECK(frechet_gaussian2(m, m) <= 1e-9);
    }

    SECTION("symmetric on real patch summaries") {
        const MomentSummary a =
            patch_moments({random_image(unit_grid(16), 53, 0.0, 1.0)}, 4);
        const MomentSummary b =
            patch_moments({random_image(unit_grid(16), 54, -0.5, 1.5)}, 4);
        const double ab = frechet_gaussian2(a, b);
        CHECK(ab > 0.0);
        CHECK(frechet_gaussian2(b, a) == Catch::Approx(ab).epsilon(1e-7).margin(1e-10));
    }

    SECTION("validation") {
        MomentSummary a, b;
        a.dim = 2;
        a.mean = {0.0, 0.0};
        a.cov.assign(4, 0.0);
        b.dim = 3;
        b.mean = {0.0, 0.0, 0.0};
        b.cov.assign(9, 0.0);
        CHECK_THROWS_AS(frechet_gaussian2(a, b), std::invalid_argument);
        CHECK_THROWS_AS(frechet_gaussian2(MomentSummary{}, MomentSummary{}),
                        std::invalid_argument);
    }
}

TEST_CASE("phase_scan self-distance vanishes and results are deterministic") {
    const ImageGrid g = unit_grid(16);
    std::vector<Image> set;
    for (std::uint64_t s : {61ULL, 62ULL, 63ULL}) set.push_back(random_image(g, s, 0.0, 1.0));
    const std::vector<double> sigmas{0.0, 0.3, 1.0};

    const auto self = phase_scan(set, set, sigmas, 17);
    REQUIRE(self.size() == sigmas.size());
    for (std::size_t i = 0; i < self.size(); ++i) {
        CHECK(self[i].sigma == sigmas[i]);
        CHECK(self[i].distance2 <= 1e-9);
    }

    std::vector<Image> other;
    for (std::uint64_t s : {71ULL, 72ULL, 73ULL}) other.push_back(random_image(g, s, 0.0, 1.0));
    const auto a = phase_scan(set, other, sigmas, 17);
    const auto b = phase_scan(set, other, sigmas, 17);
    REQUIRE(a.size() == b.size());
    CHECK(a[0].distance2 > 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].distance2 == b[i].distance2);

    CHECK_THROWS_AS(phase_scan({}, set, sigmas, 17), std::invalid_argument);
    CHECK_THROWS_AS(phase_scan(set, {}, sigmas, 17), std::invalid_argument);
    CHECK_THROWS_AS(phase_scan(set, set, {0.0, -0.1}, 17), std::invalid_argument);
}

TEST_CASE("phase_scan decays once noise masks sparse-view artifacts") {
    const ImageGrid g{64, 2.0 / 64};
    const std::vector<Image> clean = make_phantom_variants(g, 12, 42, 0.1);
    const ScanGeometry full = make_parallel_geometry(96, g);
    std::vector<Image> corrupted;
    for (const Image& ph : clean)
        corrupted.push_back(fbp(subsample_views(forward_project(ph, full), 8), g));

    const std::vector<double> sigmas{0.0, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2};
    const auto pts = phase_scan(corrupted, clean, sigmas, 7);
    REQUIRE(pts.size() == sigmas.size());

    const double d0 = pts.front().distance2;
    CHECK(d0 > 0.01);
    CHECK(pts.back().distance2 <= 0.1 * d0);
    for (std::size_t i = 1; i < pts.size(); ++i)
        CHECK(pts[i].distance2 <= pts[i - 1].distance2 + 0.1 * d0);
}
