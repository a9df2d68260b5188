#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "icpower/matrix.hpp"

namespace icpower {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Static parameters of the K-pair interference channel problem. Powers,
// gamma0 and noise are linear scale; dB conversion happens at the CLI
// boundary only.
struct SystemConfig {
    std::size_t K = 4;
    double gamma0 = 0.1;            // minimum SINR threshold (-10 dB)
    double p0 = 0.3;                // tolerable outage probability
    double p_min = 1.0;             // power box, 0 dB
    double p_max = db_to_linear(4.0);
    std::vector<double> noise;      // sigma_k^2 per receiver
    Matrix mean_gains;              // E|h_kj|^2, exponential fading means
    std::size_t n_levels = 5;       // discrete power levels per user

    // All-ones mean gains and unit noise, the default fading geometry.
    static SystemConfig make(std::size_t K) {
        SystemConfig cfg;
        cfg.K = K;
        cfg.noise.assign(K, 1.0);
        cfg.mean_gains = Matrix::constant(K, K, 1.0);
        return cfg;
    }

    void validate() const {
        if (K < 1) throw std::invalid_argument("SystemConfig: K must be >= 1");
        if (!(gamma0 > 0.0)) throw std::invalid_argument("SystemConfig: gamma0 must be > 0");
        if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("SystemConfig: p0 must be in (0,1)");
        if (!(p_min > 0.0 && p_min <= p_max))
            throw std::invalid_argument("SystemConfig: need 0 < p_min <= p_max");
        if (noise.size() != K) throw std::invalid_argument("SystemConfig: noise size != K");
        for (double s : noise)
            if (!(s > 0.0)) throw std::invalid_argument("SystemConfig: noise powers must be > 0");
        if (mean_gains.rows() != K || mean_gains.cols() != K)
            throw std::invalid_argument("SystemConfig: mean_gains must be K x K");
        for (std::size_t i = 0; i < mean_gains.size(); ++i)
            if (!(mean_gains.data()[i] > 0.0))
                throw std::invalid_argument("SystemConfig: mean gains must be > 0");
        if (n_levels < 2) throw std::invalid_argument("SystemConfig: n_levels must be >= 2");
    }
};

// Length-K transmit power vector, linear scale.
struct PowerAllocation {
    std::vector<double> p;

    PowerAllocation() = default;
    explicit PowerAllocation(std::vector<double> powers) : p(std::move(powers)) {}
    PowerAllocation(std::initializer_list<double> powers) : p(powers) {}
    PowerAllocation(std::size_t K, double level) : p(K, level) {}

    std::size_t size() const { return p.size(); }
    double& operator[](std::size_t k) { return p[k]; }
    double operator[](std::size_t k) const { return p[k]; }

    friend bool operator==(const PowerAllocation& a, const PowerAllocation& b) = default;
};

// Discrete power grid, uniform in dB across [p_min, p_max]:
//   level(d) = p_min * (p_max / p_min)^(d / (levels - 1)).
// A single-level grid collapses to p_min.
inline double power_level(double p_min, double p_max, std::size_t levels, std::size_t digit) {
    if (digit >= levels) throw std::invalid_argument("power_level: digit out of range");
    if (levels == 1) return p_min;
    const double frac = static_cast<double>(digit) / static_cast<double>(levels - 1);
    return p_min * std::pow(p_max / p_min, frac);
}

inline bool in_power_box(const SystemConfig& cfg, const PowerAllocation& powers, double tol = 0.0) {
    if (powers.size() != cfg.K) return false;
    for (double pk : powers.p)
        if (pk < cfg.p_min * (1.0 - tol) || pk > cfg.p_max * (1.0 + tol)) return false;
    return true;
}

} // namespace icpower
