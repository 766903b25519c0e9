#pragma once

#include "ratchet/dist.hpp"
#include "ratchet/instance.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <vector>

// Shared fixtures for the test binaries. Random families are drawn from
// seeded generators so every run sees the same instances.
namespace testutil {

inline std::string scenario_path(const std::string& name) {
    if (const char* dir = std::getenv("RATCHET_SCENARIO_DIR"))
        return std::string(dir) + "/" + name;
    return std::string(RATCHET_TEST_SCENARIO_DIR) + "/" + name;
}

// Transition rows built by integrating the exact conditional law over the
// to-grid cells (midpoint windows, open ends). Unlike the mass-splitting
// builder, these rows inherit the likelihood-ratio structure of the
// continuous family, so they are the right fixtures for the order-property
// checkers. Means are quantized at O(h^2) instead of exact.
inline ratchet::MarkovKernel ar1_uniform_cells(const ratchet::TypeGrid& from, double alpha,
                                               double lo, double width, std::size_t m) {
    const double a = std::min(alpha * from.min(), alpha * from.max()) + lo;
    const double b = std::max(alpha * from.min(), alpha * from.max()) + lo + width;
    std::vector<double> pts(m);
    for (std::size_t j = 0; j < m; ++j)
        pts[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(m - 1);
    auto cdf = [&](double y, double x) {
        const double z = (y - alpha * x - lo) / width;
        return z < 0.0 ? 0.0 : (z > 1.0 ? 1.0 : z);
    };
    std::vector<std::vector<double>> rows(from.size(), std::vector<double>(m));
    for (std::size_t i = 0; i < from.size(); ++i) {
        const double x = from.points[i];
        double prev = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double hi = j + 1 < m ? cdf(0.5 * (pts[j] + pts[j + 1]), x) : 1.0;
            rows[i][j] = hi - prev;
            prev = hi;
        }
    }
    return ratchet::kernel_from_table(from, std::move(pts), std::move(rows),
                                      ratchet::GridKind::Density);
}

// Gaussian cell mass with both tails evaluated on their own side of the
// complementary error function; a plain cdf difference saturates near 1 and
// punches exact zeros into the middle of deep-tail rows.
inline double gauss_cell_mass(double zlo, double zhi) {
    const double r = std::sqrt(2.0);
    if (zlo >= 0.0) return 0.5 * (std::erfc(zlo / r) - std::erfc(zhi / r));
    if (zhi <= 0.0) return 0.5 * (std::erfc(-zhi / r) - std::erfc(-zlo / r));
    return 0.5 * (std::erf(zhi / r) - std::erf(zlo / r));
}

inline ratchet::MarkovKernel ar1_gauss_cells(const ratchet::TypeGrid& from, double alpha,
                                             double mu, double sigma, std::size_t m) {
    const double a = std::min(alpha * from.min(), alpha * from.max()) + mu - 5.0 * sigma;
    const double b = std::max(alpha * from.min(), alpha * from.max()) + mu + 5.0 * sigma;
    std::vector<double> pts(m);
    for (std::size_t j = 0; j < m; ++j)
        pts[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(m - 1);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> rows(from.size(), std::vector<double>(m));
    for (std::size_t i = 0; i < from.size(); ++i) {
        const double c = alpha * from.points[i] + mu;
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double lo = j == 0 ? -inf : 0.5 * (pts[j - 1] + pts[j]);
            const double hi = j + 1 < m ? 0.5 * (pts[j] + pts[j + 1]) : inf;
            rows[i][j] = gauss_cell_mass((lo - c) / sigma, (hi - c) / sigma);
            total += rows[i][j];
        }
        for (double& v : rows[i]) v /= total;
    }
    return ratchet::kernel_from_table(from, std::move(pts), std::move(rows),
                                      ratchet::GridKind::Density);
}

// Seeded family of well-behaved instances: log-concave truncated-Gaussian
// prior, positively correlated AR(1) transition with stationary-matched
// Gaussian innovations, discount 1.
struct Ar1Params {
    double mu = 0.0;
    double sigma = 0.0;
    double alpha = 0.0;
};

inline Ar1Params draw_ar1_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mu(1.2, 1.8);
    std::uniform_real_distribution<double> sigma(0.15, 0.35);
    std::uniform_real_distribution<double> alpha(0.15, 0.85);
    Ar1Params q;
    q.mu = mu(rng);
    q.sigma = sigma(rng);
    q.alpha = alpha(rng);
    return q;
}

inline ratchet::Instance make_ar1_instance(const Ar1Params& q, std::size_t n) {
    ratchet::TypeGrid prior = ratchet::make_trunc_gaussian(q.mu, q.sigma, n);
    const double noise_mu = (1.0 - q.alpha) * q.mu;
    const double noise_sigma = q.sigma * std::sqrt(1.0 - q.alpha * q.alpha);
    ratchet::MarkovKernel k = ar1_gauss_cells(prior, q.alpha, noise_mu, noise_sigma, n);
    return ratchet::make_two_period(std::move(prior), std::move(k), 1.0);
}

} // namespace testutil
