#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "icpower/channel.hpp"
#include "icpower/config.hpp"

namespace icpower {

// Iteration variables of the scalar weighted-MMSE sum-rate baseline.
// Invariants between updates: 0 <= v[k] <= sqrt(p_max), w[k] >= 1.
struct WmmseState {
    std::vector<double> v;  // amplifier gains, v_k^2 is the transmit power
    std::vector<double> u;  // receive gains
    std::vector<double> w;  // MSE weights
};

// Sum-rate maximization by alternating closed-form updates of (u, w, v).
// Unconstrained below p_max: returned powers may fall under any nominal
// minimum, by design (this baseline ignores reliability constraints).
//
// The all-equal start v_k = sqrt(p_max) is a fixed point of the iteration
// whenever the gain matrix is symmetric (the box clip restores exact
// symmetry even under perturbation), which parks strong-interference
// instances at a poor stationary point. The ramp factor below breaks the
// symmetry by enough to survive the clip while staying deterministic; on
// asymmetric instances it converges to the same points as the flat start.
//
// Each outer iteration re-solves all three blocks exactly (the v step is a
// positive-curvature quadratic, so the box clip is its exact constrained
// minimizer), hence the sum-rate is non-decreasing across iterations.
//
// rate_trace, when given, receives the sum-rate after every outer iteration.
inline PowerAllocation wmmse_allocate(const ChannelRealization& channel,
                                      const std::vector<double>& noise,
                                      double p_max,
                                      double tol = 1e-6,
                                      int max_iter = 500,
                                      std::vector<double>* rate_trace = nullptr) {
    const std::size_t K = channel.users();
    if (noise.size() != K) throw std::invalid_argument("wmmse_allocate: noise size mismatch");
    if (!(p_max > 0.0)) throw std::invalid_argument("wmmse_allocate: p_max must be positive");

    const Matrix& g = channel.gains;
    const double v_max = std::sqrt(p_max);
    WmmseState st{std::vector<double>(K), std::vector<double>(K), std::vector<double>(K)};
    for (std::size_t k = 0; k < K; ++k) {
        const double ramp = (K > 1) ? 0.3 * static_cast<double>(k) / static_cast<double>(K - 1) : 0.0;
        st.v[k] = v_max * (1.0 - ramp);
    }
    if (rate_trace) rate_trace->clear();

    auto powers_of = [&] {
        PowerAllocation p(K, 0.0);
        for (std::size_t k = 0; k < K; ++k) p[k] = st.v[k] * st.v[k];
        return p;
    };

    double prev_rate = 0.0;
    bool have_prev = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        for (std::size_t k = 0; k < K; ++k) {
            double denom = noise[k];
            for (std::size_t j = 0; j < K; ++j) denom += g(k, j) * st.v[j] * st.v[j];
            st.u[k] = std::sqrt(g(k, k)) * st.v[k] / denom;
        }
        for (std::size_t k = 0; k < K; ++k)
            st.w[k] = 1.0 / (1.0 - st.u[k] * std::sqrt(g(k, k)) * st.v[k]);
        for (std::size_t k = 0; k < K; ++k) {
            double denom = 0.0;
            for (std::size_t j = 0; j < K; ++j) denom += st.w[j] * st.u[j] * st.u[j] * g(j, k);
            // denom == 0 only when every u is 0 (all-zero v), which the init precludes;
            // guard anyway so a degenerate state recovers instead of dividing by zero.
            const double vk = (denom > 0.0) ? st.w[k] * st.u[k] * std::sqrt(g(k, k)) / denom : v_max;
            st.v[k] = std::clamp(vk, 0.0, v_max);
        }

        const double rate = sum_rate(channel, powers_of(), noise).sum;
        if (rate_trace) rate_trace->push_back(rate);
        if (have_prev && std::abs(rate - prev_rate) < tol) break;
        prev_rate = rate;
        have_prev = true;
    }
    return powers_of();
}

}  // namespace icpower
