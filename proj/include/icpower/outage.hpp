#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "icpower/channel.hpp"
#include "icpower/config.hpp"
#include "icpower/rng.hpp"

namespace icpower {

// Closed-form outage probability of user k in the interference-limited
// regime, driven by the statistical (mean) gains:
//   O_k = 1 - prod_{j != k} 1 / (1 + gamma0 G_kj p_j / (G_kk p_k)).
// K = 1 has no interferers, so the empty product gives outage 0.
inline double outage_closed_form(const SystemConfig& cfg, const PowerAllocation& powers,
                                 std::size_t k) {
    if (k >= cfg.K) throw std::invalid_argument("outage_closed_form: user index out of range");
    if (powers.size() != cfg.K) throw std::invalid_argument("outage_closed_form: dimension mismatch");
    double prod = 1.0;
    const double direct = cfg.mean_gains(k, k) * powers[k];
    for (std::size_t j = 0; j < cfg.K; ++j) {
        if (j == k) continue;
        prod *= 1.0 / (1.0 + cfg.gamma0 * cfg.mean_gains(k, j) * powers[j] / direct);
    }
    return std::clamp(1.0 - prod, 0.0, 1.0);
}

struct OutageEstimate {
    double probability = 0.0;
    double std_error = 0.0; // binomial, sqrt(p(1-p)/N)
    std::size_t samples = 0;
};

// Empirical outage frequency over fresh exponential fading draws with the
// configured means. The canonical event drops noise (interference-limited);
// include_noise switches to the exact SINR event of the chance constraint.
inline OutageEstimate outage_monte_carlo(const SystemConfig& cfg, const PowerAllocation& powers,
                                         std::size_t k, std::size_t samples, Rng& rng,
                                         bool include_noise = false) {
    if (k >= cfg.K) throw std::invalid_argument("outage_monte_carlo: user index out of range");
    if (powers.size() != cfg.K) throw std::invalid_argument("outage_monte_carlo: dimension mismatch");
    if (samples < 1) throw std::invalid_argument("outage_monte_carlo: samples must be >= 1");
    std::size_t hits = 0;
    const double sigma2 = include_noise ? cfg.noise[k] : 0.0;
    for (std::size_t n = 0; n < samples; ++n) {
        double direct = exponential(rng, cfg.mean_gains(k, k)) * powers[k];
        double interference = 0.0;
        for (std::size_t j = 0; j < cfg.K; ++j)
            if (j != k) interference += exponential(rng, cfg.mean_gains(k, j)) * powers[j];
        if (direct <= cfg.gamma0 * (interference + sigma2)) ++hits;
    }
    OutageEstimate est;
    est.samples = samples;
    est.probability = static_cast<double>(hits) / static_cast<double>(samples);
    est.std_error = std::sqrt(est.probability * (1.0 - est.probability) / static_cast<double>(samples));
    return est;
}

// Posynomial reliability condition for user k:
//   (1 - p0) prod_{j != k} (1 + gamma0 G_kj p_j / (G_kk p_k)) <= 1.
// Algebraically identical to outage_closed_form(k) <= p0.
inline bool outage_constraint_ok(const SystemConfig& cfg, const PowerAllocation& powers,
                                 std::size_t k) {
    if (k >= cfg.K) throw std::invalid_argument("outage_constraint_ok: user index out of range");
    if (powers.size() != cfg.K) throw std::invalid_argument("outage_constraint_ok: dimension mismatch");
    double prod = 1.0;
    const double direct = cfg.mean_gains(k, k) * powers[k];
    for (std::size_t j = 0; j < cfg.K; ++j) {
        if (j == k) continue;
        prod *= 1.0 + cfg.gamma0 * cfg.mean_gains(k, j) * powers[j] / direct;
    }
    return (1.0 - cfg.p0) * prod <= 1.0;
}

inline std::vector<bool> outage_constraint_ok(const SystemConfig& cfg, const PowerAllocation& powers) {
    std::vector<bool> ok(cfg.K);
    for (std::size_t k = 0; k < cfg.K; ++k) ok[k] = outage_constraint_ok(cfg, powers, k);
    return ok;
}

} // namespace icpower
