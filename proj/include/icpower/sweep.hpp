#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "icpower/dqn.hpp"
#include "icpower/gp.hpp"
#include "icpower/wmmse.hpp"

namespace icpower {

enum class Method { dqn, dqn_no_constraint, gp, wmmse, random_levels, equal_power };

inline const std::vector<Method>& all_methods() {
    static const std::vector<Method> m{Method::dqn,    Method::dqn_no_constraint, Method::gp,
                                       Method::wmmse,  Method::random_levels,     Method::equal_power};
    return m;
}

inline std::string method_name(Method m) {
    switch (m) {
        case Method::dqn: return "dqn";
        case Method::dqn_no_constraint: return "dqn-no-constraint";
        case Method::gp: return "gp";
        case Method::wmmse: return "wmmse";
        case Method::random_levels: return "random";
        case Method::equal_power: return "equal-power";
    }
    throw std::logic_error("method_name: unknown method");
}

inline Method method_from_name(const std::string& name) {
    for (Method m : all_methods())
        if (method_name(m) == name) return m;
    throw std::invalid_argument("unknown method: " + name);
}

enum class SweptParameter { p_max, p0, K };

inline std::string parameter_name(SweptParameter p) {
    switch (p) {
        case SweptParameter::p_max: return "p_max";
        case SweptParameter::p0: return "p0";
        case SweptParameter::K: return "K";
    }
    throw std::logic_error("parameter_name: unknown parameter");
}

inline SweptParameter parameter_from_name(const std::string& name) {
    for (SweptParameter p : {SweptParameter::p_max, SweptParameter::p0, SweptParameter::K})
        if (parameter_name(p) == name) return p;
    throw std::invalid_argument("unknown swept parameter: " + name);
}

// One experiment: vary a single parameter over sorted values, score each
// method on `realizations` paired channel draws per point. The swept
// p_max values are linear scale (the CLI converts from dB).
struct SweepSpec {
    SweptParameter parameter = SweptParameter::p_max;
    std::vector<double> values;
    std::size_t realizations = 500;
    std::vector<Method> methods = all_methods();
    std::uint64_t master_seed = 1;
    SystemConfig base = SystemConfig::make(4);
    TrainingConfig training;

    void validate() const {
        base.validate();
        training.validate();
        if (values.empty()) throw std::invalid_argument("SweepSpec: empty value list");
        if (!std::is_sorted(values.begin(), values.end()))
            throw std::invalid_argument("SweepSpec: values must be sorted ascending");
        if (realizations < 1) throw std::invalid_argument("SweepSpec: realizations must be >= 1");
        if (methods.empty()) throw std::invalid_argument("SweepSpec: no methods selected");
        for (double v : values) {
            switch (parameter) {
                case SweptParameter::p_max:
                    if (!(v >= base.p_min))
                        throw std::invalid_argument("SweepSpec: swept p_max below p_min");
                    break;
                case SweptParameter::p0:
                    if (!(v > 0.0 && v < 1.0))
                        throw std::invalid_argument("SweepSpec: swept p0 outside (0,1)");
                    break;
                case SweptParameter::K:
                    if (v < 1.0 || v != std::floor(v))
                        throw std::invalid_argument("SweepSpec: swept K must be a positive integer");
                    break;
            }
        }
    }
};

// Instantiate the system for one swept value. A K sweep rebuilds the
// gain/noise shapes at the new size (unit means), keeping every scalar
// field of the base configuration.
inline SystemConfig config_for_value(const SweepSpec& spec, double value) {
    SystemConfig cfg = spec.base;
    switch (spec.parameter) {
        case SweptParameter::p_max:
            cfg.p_max = value;
            break;
        case SweptParameter::p0:
            cfg.p0 = value;
            break;
        case SweptParameter::K: {
            const std::size_t K = static_cast<std::size_t>(value);
            SystemConfig sized = SystemConfig::make(K);
            sized.gamma0 = cfg.gamma0;
            sized.p0 = cfg.p0;
            sized.p_min = cfg.p_min;
            sized.p_max = cfg.p_max;
            sized.n_levels = cfg.n_levels;
            cfg = sized;
            break;
        }
    }
    cfg.validate();
    return cfg;
}

// Seed derivation. The channel stream never depends on the method, so
// every method at one sweep point faces the identical fading sequence,
// and it never depends on the sweep point either: the fading law is the
// same at every point, so reusing one stream is a common-random-numbers
// pairing that lets a genuinely flat curve come out flat instead of
// rank-shuffled by per-point sampling noise. Method-side randomness gets
// its own labeled streams.
namespace seed_tag {
inline constexpr std::uint64_t channel = 10;
inline constexpr std::uint64_t policy = 20;
inline constexpr std::uint64_t training = 30;
}  // namespace seed_tag

inline std::uint64_t channel_seed(std::uint64_t master) {
    return derive_seed(master, {seed_tag::channel});
}

inline std::uint64_t policy_seed(std::uint64_t master, Method m) {
    return derive_seed(master, {seed_tag::policy, static_cast<std::uint64_t>(m)});
}

inline std::uint64_t training_seed(std::uint64_t master, Method m) {
    return derive_seed(master, {seed_tag::training, static_cast<std::uint64_t>(m)});
}

struct MethodEvaluation {
    double mean_sum_rate = 0.0;
    double sum_rate_std_error = 0.0;
    double mean_min_rate = 0.0;
    double violation_frequency = 0.0;
    double mean_reward = 0.0;
    std::size_t realizations = 0;
};

// Shared evaluation loop. policy(channel, prev_powers, policy_rng) picks
// the powers; all channel draws come from channel_rng so different
// policies can be run against byte-identical fading sequences.
template <typename PolicyFn>
MethodEvaluation evaluate_with(const SystemConfig& cfg, std::size_t n, Rng& channel_rng,
                               Rng& policy_rng, PolicyFn&& policy,
                               RewardMode mode = RewardMode::masked_sum) {
    MethodEvaluation out;
    out.realizations = n;
    std::vector<double> samples;
    samples.reserve(n);
    PowerAllocation prev(cfg.K, cfg.p_min);
    for (std::size_t i = 0; i < n; ++i) {
        const ChannelRealization channel = sample_channel(cfg, channel_rng);
        const PowerAllocation powers = policy(channel, prev, policy_rng);
        const RateSummary rates = sum_rate(channel, powers, cfg.noise);
        samples.push_back(rates.sum);
        out.mean_sum_rate += rates.sum;
        out.mean_min_rate += *std::min_element(rates.per_user.begin(), rates.per_user.end());
        const std::vector<bool> ok = outage_constraint_ok(cfg, powers);
        if (std::find(ok.begin(), ok.end(), false) != ok.end()) out.violation_frequency += 1.0;
        out.mean_reward += compute_reward(channel, powers, cfg, mode);
        prev = powers;
    }
    if (n > 0) {
        const double dn = static_cast<double>(n);
        out.mean_sum_rate /= dn;
        out.mean_min_rate /= dn;
        out.violation_frequency /= dn;
        out.mean_reward /= dn;
        if (n > 1) {
            double ss = 0.0;
            for (double s : samples) ss += (s - out.mean_sum_rate) * (s - out.mean_sum_rate);
            out.sum_rate_std_error = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(dn);
        }
    }
    return out;
}

// The DQN policy used by sweeps: greedy up to the training-final epsilon.
inline auto make_dqn_policy(const QNetworkParams& params, const SystemConfig& cfg, double epsilon) {
    return [&params, &cfg, epsilon](const ChannelRealization& channel, const PowerAllocation& prev,
                                    Rng& policy_rng) {
        const std::vector<double> state = encode_state(channel, prev, cfg);
        return decode_action(select_action(forward(params, state), epsilon, policy_rng), cfg);
    };
}

struct SweepRow {
    double swept_value = 0.0;
    std::string method;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    std::size_t n = 0;
    bool infeasible = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;              // one per (value, method), CSV-backed fields
    std::vector<MethodEvaluation> details;   // parallel to rows; empty stats on infeasible rows
    SweepSpec spec;
};

// Score every (value, method) cell. DQN arms train inline from their own
// derived seed; the statistical GP arm solves once per point (it sees
// only mean gains) and is reported infeasible as a NaN row rather than
// dropped. The mean metric is the evaluation sum-rate.
inline SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult result;
    result.spec = spec;
    const std::uint64_t ch_seed = channel_seed(spec.master_seed);
    for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
        const double value = spec.values[vi];
        const SystemConfig cfg = config_for_value(spec, value);
        for (Method m : spec.methods) {
            SweepRow row;
            row.swept_value = value;
            row.method = method_name(m);
            MethodEvaluation eval;
            Rng channel_rng = make_rng(ch_seed);
            Rng policy_rng = make_rng(policy_seed(spec.master_seed, m));
            switch (m) {
                case Method::dqn:
                case Method::dqn_no_constraint: {
                    TrainingConfig tc = spec.training;
                    tc.reward_mode = (m == Method::dqn) ? RewardMode::masked_sum
                                                        : RewardMode::unconstrained;
                    Rng train_rng = make_rng(training_seed(spec.master_seed, m));
                    const TrainResult trained = train(cfg, tc, train_rng);
                    eval = evaluate_with(cfg, spec.realizations, channel_rng, policy_rng,
                                         make_dqn_policy(trained.params, cfg,
                                                         trained.final_epsilon),
                                         tc.reward_mode);
                    break;
                }
                case Method::gp: {
                    const GPSolution sol = solve_maxmin_gp(cfg.mean_gains, cfg);
                    if (!sol.feasible) {
                        row.infeasible = true;
                        result.rows.push_back(row);
                        result.details.push_back(MethodEvaluation{});
                        continue;
                    }
                    eval = evaluate_with(cfg, spec.realizations, channel_rng, policy_rng,
                                         [&sol](const ChannelRealization&, const PowerAllocation&,
                                                Rng&) { return sol.powers; });
                    break;
                }
                case Method::wmmse:
                    eval = evaluate_with(cfg, spec.realizations, channel_rng, policy_rng,
                                         [&cfg](const ChannelRealization& channel,
                                                const PowerAllocation&, Rng&) {
                                             return wmmse_allocate(channel, cfg.noise, cfg.p_max);
                                         });
                    break;
                case Method::random_levels: {
                    const std::size_t n_actions = action_count(cfg);
                    eval = evaluate_with(cfg, spec.realizations, channel_rng, policy_rng,
                                         [&cfg, n_actions](const ChannelRealization&,
                                                           const PowerAllocation&, Rng& rng) {
                                             return decode_action(uniform_index(rng, n_actions),
                                                                  cfg);
                                         });
                    break;
                }
                case Method::equal_power:
                    eval = evaluate_with(cfg, spec.realizations, channel_rng, policy_rng,
                                         [&cfg](const ChannelRealization&, const PowerAllocation&,
                                                Rng&) { return PowerAllocation(cfg.K, cfg.p_max); });
                    break;
            }
            row.mean = eval.mean_sum_rate;
            row.std_error = eval.sum_rate_std_error;
            row.n = eval.realizations;
            result.rows.push_back(row);
            result.details.push_back(eval);
        }
    }
    return result;
}

// CSV: fixed six-column header, %.17g doubles so a re-parse is lossless.
inline std::string sweep_csv(const SweepResult& result) {
    std::string out = "swept_value,method,mean,stderr,n,infeasible\n";
    char buf[128];
    for (const SweepRow& r : result.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,", r.swept_value);
        out += buf;
        out += r.method;
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%zu,%d\n", r.mean, r.std_error, r.n,
                      r.infeasible ? 1 : 0);
        out += buf;
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::vector<SweepRow> read_sweep_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line) || line != "swept_value,method,mean,stderr,n,infeasible")
        throw std::runtime_error("bad CSV header in " + path);
    std::vector<SweepRow> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        SweepRow r;
        std::getline(ss, field, ',');
        r.swept_value = std::strtod(field.c_str(), nullptr);
        std::getline(ss, r.method, ',');
        std::getline(ss, field, ',');
        r.mean = std::strtod(field.c_str(), nullptr);
        std::getline(ss, field, ',');
        r.std_error = std::strtod(field.c_str(), nullptr);
        std::getline(ss, field, ',');
        r.n = static_cast<std::size_t>(std::strtoull(field.c_str(), nullptr, 10));
        if (!std::getline(ss, field, ','))
            throw std::runtime_error("short CSV row in " + path);
        r.infeasible = field == "1";
        rows.push_back(r);
    }
    return rows;
}

// Spearman rank correlation with average ranks on ties. NaNs are the
// caller's concern: filter rows first.
inline double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("spearman_rho: need two equally sized samples of >= 2");
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
            for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x), ry = ranks(y);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= rx.size();
    my /= ry.size();
    double num = 0, dx = 0, dy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx == 0.0 || dy == 0.0) return 0.0;  // a constant sequence carries no ordering
    return num / std::sqrt(dx * dy);
}

// Closed form vs Monte-Carlo over random (gains, powers, user) draws.
// z uses the larger of the sample and null-hypothesis standard errors so
// near-degenerate probabilities cannot divide by zero.
struct OutageVerifyReport {
    std::size_t trials = 0;
    double max_abs_z = 0.0;
    bool pass = true;
};

inline OutageVerifyReport verify_outage(const SystemConfig& base, std::size_t trials,
                                        std::size_t mc_samples, Rng& rng) {
    OutageVerifyReport report;
    report.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        SystemConfig cfg = base;
        for (std::size_t a = 0; a < cfg.K; ++a)
            for (std::size_t b = 0; b < cfg.K; ++b) cfg.mean_gains(a, b) = exponential(rng, 1.0);
        cfg.gamma0 = db_to_linear(-15.0 + 20.0 * uniform01(rng));
        PowerAllocation p(cfg.K, cfg.p_min);
        for (std::size_t k = 0; k < cfg.K; ++k)
            p[k] = cfg.p_min + (cfg.p_max - cfg.p_min) * uniform01(rng);
        const std::size_t k = uniform_index(rng, cfg.K);
        const double closed = outage_closed_form(cfg, p, k);
        const OutageEstimate mc = outage_monte_carlo(cfg, p, k, mc_samples, rng);
        const double null_se =
            std::sqrt(std::max(closed * (1.0 - closed), 0.0) / static_cast<double>(mc_samples));
        const double se = std::max({mc.std_error, null_se, 1e-300});
        const double z = (mc.probability - closed) / se;
        report.max_abs_z = std::max(report.max_abs_z, std::abs(z));
    }
    report.pass = report.max_abs_z <= 4.0;
    return report;
}

// Bisection solver vs exhaustive grid on random instances; certifies the
// relative eta shortfall and that both sides agree on feasibility.
struct GpVerifyReport {
    std::size_t instances = 0;
    std::size_t K = 0;
    double max_shortfall = 0.0;  // max over instances of 1 - eta/oracle
    std::size_t verdict_mismatches = 0;
    std::size_t witness_violations = 0;
    bool pass = true;
};

inline GpVerifyReport verify_gp(const SystemConfig& base, std::size_t instances,
                                std::size_t grid_levels, Rng& rng) {
    if (base.K > 3) throw std::invalid_argument("verify_gp: oracle restricted to K <= 3");
    GpVerifyReport report;
    report.instances = instances;
    report.K = base.K;
    for (std::size_t i = 0; i < instances; ++i) {
        SystemConfig cfg = base;
        for (std::size_t a = 0; a < cfg.K; ++a)
            for (std::size_t b = 0; b < cfg.K; ++b) cfg.mean_gains(a, b) = exponential(rng, 1.0);
        const GPSolution sol = solve_maxmin_gp(cfg.mean_gains, cfg);
        const GridOracleResult oracle = grid_oracle(cfg.mean_gains, cfg, grid_levels);
        if (sol.feasible != oracle.any_feasible) {
            ++report.verdict_mismatches;
            continue;
        }
        if (!sol.feasible) continue;
        const std::vector<bool> ok = outage_constraint_ok(cfg, sol.powers);
        if (std::find(ok.begin(), ok.end(), false) != ok.end()) ++report.witness_violations;
        if (oracle.best_min_sinr > 0.0)
            report.max_shortfall =
                std::max(report.max_shortfall, 1.0 - sol.eta / oracle.best_min_sinr);
    }
    report.pass = report.verdict_mismatches == 0 && report.witness_violations == 0 &&
                  report.max_shortfall <= 0.02;
    return report;
}

// Minimal static SVG: one polyline per method over the sweep values,
// 95% error whiskers, log-ready only in the sense that the caller picks
// the value scale. Purely deterministic text output.
inline std::string sweep_svg(const SweepResult& result, const std::string& x_label) {
    const double W = 640, H = 420, ml = 62, mr = 150, mt = 24, mb = 46;
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
    for (const SweepRow& r : result.rows) {
        xmin = std::min(xmin, r.swept_value);
        xmax = std::max(xmax, r.swept_value);
        if (!r.infeasible && std::isfinite(r.mean)) {
            ymax = std::max(ymax, r.mean + 2.0 * r.std_error);
            ymin = std::min(ymin, r.mean - 2.0 * r.std_error);
        }
    }
    if (!(ymax > -1e300)) {
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    const double span_y = ymax - ymin;
    ymin -= 0.05 * span_y;
    ymax += 0.05 * span_y;
    auto X = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double v) { return H - mb - (v - ymin) / (ymax - ymin) * (H - mt - mb); };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#8c564b", "#ff7f0e"};
    char buf[256];
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
           "viewBox=\"0 0 640 420\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  ml, H - mb, W - mr, H - mb);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", ml,
                  mt, ml, H - mb);
    svg += buf;
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 4.0;
        const double yv = ymin + (ymax - ymin) * t / 4.0;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.3g</text>\n", X(xv),
                      H - mb + 16, xv);
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n", ml - 6,
                      Y(yv) + 4, yv);
        svg += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n",
                  ml + (W - ml - mr) / 2, H - 8, x_label.c_str());
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"14\" y=\"%.1f\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
                  "%.1f)\">mean sum-rate (bits/s/Hz)</text>\n",
                  mt + (H - mt - mb) / 2, mt + (H - mt - mb) / 2);
    svg += buf;

    std::size_t mi = 0;
    for (Method m : result.spec.methods) {
        const std::string name = method_name(m);
        const char* color = palette[mi % 6];
        std::string points;
        for (const SweepRow& r : result.rows) {
            if (r.method != name || r.infeasible || !std::isfinite(r.mean)) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(r.swept_value), Y(r.mean));
            points += buf;
            std::snprintf(
                buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\"/>\n",
                X(r.swept_value), Y(r.mean - 1.96 * r.std_error), X(r.swept_value),
                Y(r.mean + 1.96 * r.std_error), color);
            svg += buf;
            std::snprintf(buf, sizeof buf,
                          "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                          X(r.swept_value), Y(r.mean), color);
            svg += buf;
        }
        if (!points.empty()) {
            std::snprintf(buf, sizeof buf,
                          "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" "
                          "points=\"%s\"/>\n",
                          color, points.c_str());
            svg += buf;
        }
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                      "stroke-width=\"1.5\"/>\n",
                      W - mr + 10, mt + 14.0 * mi + 8, W - mr + 34, mt + 14.0 * mi + 8, color);
        svg += buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\">%s</text>\n", W - mr + 40,
                      mt + 14.0 * mi + 12, name.c_str());
        svg += buf;
        ++mi;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace icpower
