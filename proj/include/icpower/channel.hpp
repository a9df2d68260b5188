#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "icpower/config.hpp"
#include "icpower/matrix.hpp"
#include "icpower/rng.hpp"

namespace icpower {

// One block-fading draw: instantaneous power gains |h_kj|^2 from
// transmitter j to receiver k.
struct ChannelRealization {
    Matrix gains;

    std::size_t users() const { return gains.rows(); }
};

// Draws each |h_kj|^2 as an exponential variate with mean mean_gains[k][j]
// (squared magnitude of a zero-mean circularly symmetric Gaussian).
// Exactly-zero diagonal draws are resampled; the event has probability
// zero but would make the direct link dead.
inline ChannelRealization sample_channel(const SystemConfig& cfg, Rng& rng) {
    ChannelRealization ch{Matrix(cfg.K, cfg.K)};
    for (std::size_t k = 0; k < cfg.K; ++k) {
        for (std::size_t j = 0; j < cfg.K; ++j) {
            double g = exponential(rng, cfg.mean_gains(k, j));
            if (k == j) {
                while (g == 0.0) g = exponential(rng, cfg.mean_gains(k, j));
            }
            ch.gains(k, j) = g;
        }
    }
    return ch;
}

// SINR per receiver: gamma_k = g_kk p_k / (sum_{j != k} g_kj p_j + sigma_k^2).
inline std::vector<double> sinr(const ChannelRealization& ch, const PowerAllocation& powers,
                                const std::vector<double>& noise) {
    const std::size_t K = ch.users();
    if (powers.size() != K || noise.size() != K || ch.gains.cols() != K)
        throw std::invalid_argument("sinr: dimension mismatch");
    std::vector<double> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        double interference = 0.0;
        for (std::size_t j = 0; j < K; ++j)
            if (j != k) interference += ch.gains(k, j) * powers[j];
        out[k] = ch.gains(k, k) * powers[k] / (interference + noise[k]);
    }
    return out;
}

// Interference-limited SINR (noise dropped). Undefined for K = 1 and for
// an exactly-zero interference sum.
inline std::vector<double> sinr_interference_limited(const ChannelRealization& ch,
                                                     const PowerAllocation& powers) {
    const std::size_t K = ch.users();
    if (K < 2) throw std::invalid_argument("sinr_interference_limited: needs K >= 2");
    if (powers.size() != K || ch.gains.cols() != K)
        throw std::invalid_argument("sinr_interference_limited: dimension mismatch");
    std::vector<double> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        double interference = 0.0;
        for (std::size_t j = 0; j < K; ++j)
            if (j != k) interference += ch.gains(k, j) * powers[j];
        if (interference == 0.0)
            throw std::domain_error("sinr_interference_limited: zero interference sum");
        out[k] = ch.gains(k, k) * powers[k] / interference;
    }
    return out;
}

struct RateSummary {
    std::vector<double> per_user; // R_k = log2(1 + gamma_k), bits/s/Hz
    double sum = 0.0;
};

inline RateSummary sum_rate(const ChannelRealization& ch, const PowerAllocation& powers,
                            const std::vector<double>& noise) {
    RateSummary rates;
    const std::vector<double> gammas = sinr(ch, powers, noise);
    rates.per_user.resize(gammas.size());
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        rates.per_user[k] = std::log2(1.0 + gammas[k]);
        rates.sum += rates.per_user[k];
    }
    return rates;
}

} // namespace icpower
