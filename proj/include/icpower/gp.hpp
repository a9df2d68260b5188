#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "icpower/channel.hpp"
#include "icpower/config.hpp"
#include "icpower/matrix.hpp"
#include "icpower/outage.hpp"

namespace icpower {

// Max-min SINR under the outage and box constraints, solved by bisection
// on the slack level with a log-domain convex feasibility subroutine.
// The min-SINR constraint uses the instantaneous gains; the outage
// constraint uses the statistical mean gains, matching the closed form.

struct LogDomainPoint {
    std::vector<double> t; // t[k] = ln p[k]
};

struct GPSolution {
    double eta = 0.0;        // achieved min interference-limited SINR
    PowerAllocation powers;
    bool feasible = false;
    int iterations = 0;      // bisection steps
    double residual = std::numeric_limits<double>::infinity();
};

namespace detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Strict-interior acceptance margin for the feasibility subroutine; a
// witness accepted at phi <= -margin satisfies the posynomial constraint
// under the exact indicator as well.
constexpr double kInteriorMargin = 1e-9;

// log-sum-exp over ln(g[k][j]) + t[j], j != k; -inf when the row has no
// positive interference gains.
inline double interference_lse(const Matrix& gains, const std::vector<double>& t, std::size_t k) {
    double m = kNegInf;
    const std::size_t K = t.size();
    for (std::size_t j = 0; j < K; ++j) {
        if (j == k || gains(k, j) <= 0.0) continue;
        m = std::max(m, std::log(gains(k, j)) + t[j]);
    }
    if (m == kNegInf) return kNegInf;
    double acc = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
        if (j == k || gains(k, j) <= 0.0) continue;
        acc += std::exp(std::log(gains(k, j)) + t[j] - m);
    }
    return m + std::log(acc);
}

} // namespace detail

// Log-domain constraint values, <= 0 means satisfied. Layout:
//   [0, K)     min-SINR constraints  ln eta + LSE_{j!=k}(ln g_kj + t_j) - ln g_kk - t_k
//   [K, 2K)    outage constraints    ln(1-p0) + sum_{j!=k} log1p(gamma0 (G_kj/G_kk) e^{t_j - t_k})
//   [2K, 3K)   lower box             ln p_min - t_k
//   [3K, 4K)   upper box             t_k - ln p_max
inline std::vector<double> eval_constraints(const LogDomainPoint& point, double eta,
                                            const Matrix& gains, const SystemConfig& cfg) {
    const std::size_t K = cfg.K;
    if (point.t.size() != K || gains.rows() != K || gains.cols() != K)
        throw std::invalid_argument("eval_constraints: dimension mismatch");
    const std::vector<double>& t = point.t;
    std::vector<double> values(4 * K);
    const double log_eta = std::log(eta);
    for (std::size_t k = 0; k < K; ++k) {
        const double lse = detail::interference_lse(gains, t, k);
        values[k] = (lse == detail::kNegInf)
                        ? detail::kNegInf
                        : log_eta + lse - std::log(gains(k, k)) - t[k];
        double outage_log = std::log1p(-cfg.p0);
        for (std::size_t j = 0; j < K; ++j) {
            if (j == k) continue;
            const double ratio = cfg.gamma0 * cfg.mean_gains(k, j) / cfg.mean_gains(k, k);
            outage_log += std::log1p(ratio * std::exp(t[j] - t[k]));
        }
        values[K + k] = outage_log;
        values[2 * K + k] = std::log(cfg.p_min) - t[k];
        values[3 * K + k] = t[k] - std::log(cfg.p_max);
    }
    return values;
}

namespace detail {

// Max over the min-SINR and outage constraint values plus a subgradient
// of the active one. The box is handled by projection, not here.
struct PhiEval {
    double phi = kNegInf;
    std::vector<double> grad;
};

inline PhiEval phi_and_subgradient(const std::vector<double>& t, double log_eta,
                                   const Matrix& gains, const SystemConfig& cfg,
                                   bool include_min_sinr) {
    const std::size_t K = cfg.K;
    PhiEval eval;
    eval.grad.assign(K, 0.0);

    double best = kNegInf;
    std::size_t best_k = 0;
    bool best_is_outage = false;

    if (include_min_sinr) {
        for (std::size_t k = 0; k < K; ++k) {
            const double lse = interference_lse(gains, t, k);
            if (lse == kNegInf) continue;
            const double c = log_eta + lse - std::log(gains(k, k)) - t[k];
            if (c > best) {
                best = c;
                best_k = k;
                best_is_outage = false;
            }
        }
    }
    for (std::size_t k = 0; k < K; ++k) {
        double c = std::log1p(-cfg.p0);
        for (std::size_t j = 0; j < K; ++j) {
            if (j == k) continue;
            const double ratio = cfg.gamma0 * cfg.mean_gains(k, j) / cfg.mean_gains(k, k);
            c += std::log1p(ratio * std::exp(t[j] - t[k]));
        }
        if (c > best) {
            best = c;
            best_k = k;
            best_is_outage = true;
        }
    }

    eval.phi = best;
    if (best == kNegInf) return eval; // every constraint vacuous

    const std::size_t k = best_k;
    if (!best_is_outage) {
        const double lse = interference_lse(gains, t, k);
        for (std::size_t j = 0; j < K; ++j) {
            if (j == k || gains(k, j) <= 0.0) continue;
            eval.grad[j] += std::exp(std::log(gains(k, j)) + t[j] - lse);
        }
        eval.grad[k] -= 1.0;
    } else {
        double total = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
            if (j == k) continue;
            const double ratio = cfg.gamma0 * cfg.mean_gains(k, j) / cfg.mean_gains(k, k);
            const double x = ratio * std::exp(t[j] - t[k]);
            const double w = x / (1.0 + x);
            eval.grad[j] += w;
            total += w;
        }
        eval.grad[k] -= total;
    }
    return eval;
}

inline std::vector<std::vector<double>> multistart_points(std::size_t K, double t_lo, double t_hi) {
    const double mid = 0.5 * (t_lo + t_hi);
    std::vector<std::vector<double>> starts;
    starts.push_back(std::vector<double>(K, mid));
    starts.push_back(std::vector<double>(K, t_lo));
    starts.push_back(std::vector<double>(K, t_hi));
    std::vector<double> alt(K), alt2(K);
    for (std::size_t k = 0; k < K; ++k) {
        alt[k] = (k % 2 == 0) ? t_lo : t_hi;
        alt2[k] = (k % 2 == 0) ? t_hi : t_lo;
    }
    starts.push_back(alt);
    starts.push_back(alt2);
    return starts;
}

} // namespace detail

struct FeasibilityResult {
    bool feasible = false;
    LogDomainPoint witness;
    double phi = std::numeric_limits<double>::infinity(); // best max-violation found
};

// Minimizes the max constraint violation over the log-domain box by
// projected normalized subgradient descent with diminishing steps from a
// fixed multistart set (box corners + center). Both constraint families
// are convex in t, so the best value found is global up to solver
// tolerance; a verdict of infeasible is conservative.
inline FeasibilityResult feasibility_check(double eta, const Matrix& gains,
                                           const SystemConfig& cfg, double tol,
                                           int max_iters = 5000, bool include_min_sinr = true,
                                           const LogDomainPoint* warm_start = nullptr) {
    const std::size_t K = cfg.K;
    if (K < 2) throw std::invalid_argument("feasibility_check: needs K >= 2");
    if (!(eta > 0.0)) throw std::invalid_argument("feasibility_check: eta must be > 0");

    const double t_lo = std::log(cfg.p_min);
    const double t_hi = std::log(cfg.p_max);
    const double accept = std::min(tol, -detail::kInteriorMargin);
    const double log_eta = std::log(eta);
    const double step_scale = std::max(0.5 * (t_hi - t_lo), 1e-3);

    FeasibilityResult result;
    auto consider = [&](const std::vector<double>& t, double phi) {
        if (phi < result.phi) {
            result.phi = phi;
            result.witness.t = t;
        }
    };

    auto starts = detail::multistart_points(K, t_lo, t_hi);
    if (warm_start && warm_start->t.size() == K) starts.insert(starts.begin(), warm_start->t);

    std::vector<double> t(K);
    for (const auto& start : starts) {
        t = start;
        for (int iter = 1; iter <= max_iters; ++iter) {
            auto eval = detail::phi_and_subgradient(t, log_eta, gains, cfg, include_min_sinr);
            consider(t, eval.phi);
            if (result.phi <= accept) {
                result.feasible = true;
                return result;
            }
            double norm2 = 0.0;
            for (double g : eval.grad) norm2 += g * g;
            if (norm2 == 0.0) break;
            const double step = step_scale / std::sqrt(static_cast<double>(iter)) / std::sqrt(norm2);
            for (std::size_t k = 0; k < K; ++k)
                t[k] = std::clamp(t[k] - step * eval.grad[k], t_lo, t_hi);
        }
    }
    result.feasible = result.phi <= accept;
    return result;
}

// Bisection on the slack level eta over [~0, analytic upper bound]; the
// returned witness is uplifted so the loudest user sits at p_max (pure
// improvement for the noise-inclusive rates, invariant for every
// ratio-based constraint).
inline GPSolution solve_maxmin_gp(const Matrix& gains, const SystemConfig& cfg,
                                  double tol_bisect = 1e-3, double tol_feas = 1e-6,
                                  int max_inner_iters = 5000) {
    const std::size_t K = cfg.K;
    if (K < 2) throw std::invalid_argument("solve_maxmin_gp: needs K >= 2");

    GPSolution solution;

    // The outage constraint does not involve eta; if it is infeasible on
    // its own the whole (gamma0, p0) pair is unattainable in the box.
    auto outage_only = feasibility_check(1.0, gains, cfg, tol_feas, max_inner_iters, false);
    if (!outage_only.feasible) {
        solution.residual = outage_only.phi;
        return solution;
    }

    double lo = 1e-12;
    auto at_lo = feasibility_check(lo, gains, cfg, tol_feas, max_inner_iters, true,
                                   &outage_only.witness);
    if (!at_lo.feasible) {
        solution.residual = at_lo.phi;
        return solution;
    }
    LogDomainPoint witness = at_lo.witness;

    double hi = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        double denom = 0.0;
        for (std::size_t j = 0; j < K; ++j)
            if (j != k) denom += gains(k, j) * cfg.p_min;
        if (denom > 0.0) hi = std::max(hi, gains(k, k) * cfg.p_max / denom);
    }
    hi = (hi > 0.0) ? 2.0 * hi : 1e18;

    int iterations = 0;
    while (hi - lo > tol_bisect * hi && iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        auto fc = feasibility_check(mid, gains, cfg, tol_feas, max_inner_iters, true, &witness);
        if (fc.feasible) {
            lo = mid;
            witness = fc.witness;
        } else {
            hi = mid;
        }
        ++iterations;
    }

    solution.feasible = true;
    solution.iterations = iterations;
    solution.powers.p.resize(K);
    double peak = detail::kNegInf;
    for (std::size_t k = 0; k < K; ++k) peak = std::max(peak, witness.t[k]);
    const double shift = std::log(cfg.p_max) - peak;
    for (std::size_t k = 0; k < K; ++k) {
        witness.t[k] += shift;
        solution.powers.p[k] = std::exp(witness.t[k]);
    }

    double min_sinr = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
        double denom = 0.0;
        for (std::size_t j = 0; j < K; ++j)
            if (j != k) denom += gains(k, j) * solution.powers[j];
        if (denom > 0.0)
            min_sinr = std::min(min_sinr, gains(k, k) * solution.powers[k] / denom);
    }
    solution.eta = min_sinr;

    const auto residuals = eval_constraints(witness, lo, gains, cfg);
    double worst = detail::kNegInf;
    for (double v : residuals) worst = std::max(worst, v);
    solution.residual = worst;
    return solution;
}

// Exhaustive enumeration over the uniform-in-dB power grid. Certifies the
// GP solver and bounds the discrete-action policies; also tracks the
// unconstrained sum-rate optimum for baselines that ignore reliability.
struct GridOracleResult {
    bool any_feasible = false;
    double best_min_sinr = -std::numeric_limits<double>::infinity();
    PowerAllocation best_min_sinr_powers;
    double best_sum_rate = -std::numeric_limits<double>::infinity();
    PowerAllocation best_sum_rate_powers;
    double best_unconstrained_sum_rate = -std::numeric_limits<double>::infinity();
    PowerAllocation best_unconstrained_sum_rate_powers;
    std::size_t points_evaluated = 0;
};

inline GridOracleResult grid_oracle(const Matrix& gains, const SystemConfig& cfg,
                                    std::size_t levels_per_user) {
    const std::size_t K = cfg.K;
    if (levels_per_user < 1) throw std::invalid_argument("grid_oracle: levels must be >= 1");
    const double combos = std::pow(static_cast<double>(levels_per_user), static_cast<double>(K));
    if (combos > 1e7) throw std::invalid_argument("grid_oracle: grid larger than 1e7 points");

    std::vector<double> levels(levels_per_user);
    for (std::size_t i = 0; i < levels_per_user; ++i)
        levels[i] = power_level(cfg.p_min, cfg.p_max, levels_per_user, i);

    GridOracleResult result;
    ChannelRealization ch{gains};
    std::vector<std::size_t> digits(K, 0);
    PowerAllocation powers(K, levels[0]);

    while (true) {
        ++result.points_evaluated;

        bool feasible = true;
        for (std::size_t k = 0; k < K && feasible; ++k)
            feasible = outage_constraint_ok(cfg, powers, k);

        const double rate = sum_rate(ch, powers, cfg.noise).sum;
        if (rate > result.best_unconstrained_sum_rate) {
            result.best_unconstrained_sum_rate = rate;
            result.best_unconstrained_sum_rate_powers = powers;
        }

        if (feasible) {
            result.any_feasible = true;
            double min_sinr = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < K; ++k) {
                double denom = 0.0;
                for (std::size_t j = 0; j < K; ++j)
                    if (j != k) denom += gains(k, j) * powers[j];
                if (denom > 0.0)
                    min_sinr = std::min(min_sinr, gains(k, k) * powers[k] / denom);
            }
            if (min_sinr > result.best_min_sinr) {
                result.best_min_sinr = min_sinr;
                result.best_min_sinr_powers = powers;
            }
            if (rate > result.best_sum_rate) {
                result.best_sum_rate = rate;
                result.best_sum_rate_powers = powers;
            }
        }

        std::size_t pos = 0;
        while (pos < K) {
            if (++digits[pos] < levels_per_user) {
                powers[pos] = levels[digits[pos]];
                break;
            }
            digits[pos] = 0;
            powers[pos] = levels[0];
            ++pos;
        }
        if (pos == K) break;
    }
    return result;
}

} // namespace icpower
