// Release gate. Each criterion prints exactly one [PASS]/[FAIL] line and
// the binary exits nonzero if any selected criterion fails. Run a single
// criterion with --criterion N; criterion 9 additionally needs --cli
// <path-to-icpower> because it re-runs the command line tool against its
// own manifests.
//
// Every expected value below is either computed by an independent oracle
// inside this file (plain standard-library code, no icpower internals) or
// pinned as an explicit constant with its tolerance. Thresholds were
// frozen from pilot runs; they are not tuned at test time.

#include <icpower/channel.hpp>
#include <icpower/config.hpp>
#include <icpower/dqn.hpp>
#include <icpower/gp.hpp>
#include <icpower/net.hpp>
#include <icpower/outage.hpp>
#include <icpower/sweep.hpp>
#include <icpower/wmmse.hpp>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace icpower;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Shared master seed for the statistical criteria. Frozen once; all
// checks below are deterministic given this value.
constexpr std::uint64_t kMasterSeed = 20260823ull;

// Portable draws taken straight off mt19937_64: the engine's output
// sequence is pinned by the standard, while std::*_distribution is
// implementation-defined and would make these frozen statistical checks
// stdlib-dependent.
double u01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
double log10_uniform(std::mt19937_64& g, double lo, double hi) {
    return std::pow(10.0, lo + (hi - lo) * u01(g));
}
double expo1(std::mt19937_64& g) { return -std::log1p(-u01(g)); }
std::size_t pick_in(std::mt19937_64& g, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(g() % (hi - lo + 1));
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------- 1 ----
// Closed-form outage equals Monte-Carlo within 3 binomial standard
// errors on 50 random configurations, plus two hand-derivable symmetric
// values. The Monte-Carlo estimator here is written against the standard
// library only (mt19937_64 + exponential_distribution), independent of
// the library's own draw routines.
Outcome criterion1() {
    std::mt19937_64 rng(kMasterSeed + 1);

    constexpr std::size_t kConfigs = 50;
    constexpr std::size_t kSamples = 1000000;
    double worst_z = 0.0;

    for (std::size_t c = 0; c < kConfigs; ++c) {
        const std::size_t K = pick_in(rng, 2, 5);
        SystemConfig cfg = SystemConfig::make(K);
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < K; ++j)
                cfg.mean_gains(i, j) = log10_uniform(rng, -1.0, 1.0);  // 0.1..10
        cfg.gamma0 = log10_uniform(rng, -1.3, 0.3);  // 0.05..2
        PowerAllocation powers(K, 1.0);
        for (std::size_t i = 0; i < K; ++i) powers[i] = log10_uniform(rng, -0.3, 0.6);

        std::vector<std::size_t> hits(K, 0);
        std::vector<double> draw(K * K);
        for (std::size_t s = 0; s < kSamples; ++s) {
            for (std::size_t i = 0; i < K * K; ++i)
                draw[i] = cfg.mean_gains(i / K, i % K) * expo1(rng);
            for (std::size_t k = 0; k < K; ++k) {
                double interference = 0.0;
                for (std::size_t j = 0; j < K; ++j)
                    if (j != k) interference += draw[k * K + j] * powers[j];
                const double sig = draw[k * K + k] * powers[k];
                if (sig <= cfg.gamma0 * interference) ++hits[k];
            }
        }
        for (std::size_t k = 0; k < K; ++k) {
            const double closed = outage_closed_form(cfg, powers, k);
            const double mc = static_cast<double>(hits[k]) / static_cast<double>(kSamples);
            const double se =
                std::sqrt(closed * (1.0 - closed) / static_cast<double>(kSamples));
            const double z = se > 0.0 ? std::fabs(mc - closed) / se
                                      : (mc == closed ? 0.0 : 1e9);
            worst_z = std::max(worst_z, z);
            if (z > 3.0)
                return {false, fmt("config %zu user %zu: closed %.6f vs MC %.6f, |z| = %.2f > 3",
                                   c, k, closed, mc, z)};
        }
    }

    // Two-user fully symmetric case: outage = 1 - 1/(1 + gamma0).
    SystemConfig sym = SystemConfig::make(2);
    PowerAllocation equal(2, 1.0);
    sym.gamma0 = 1.0;
    const double at_one = outage_closed_form(sym, equal, 0);
    sym.gamma0 = 0.1;
    const double at_tenth = outage_closed_form(sym, equal, 0);
    if (at_one != 0.5) return {false, fmt("symmetric gamma0=1 gave %.17g, want exactly 0.5", at_one)};
    if (std::fabs(at_tenth - 1.0 / 11.0) > 1e-15)
        return {false, fmt("symmetric gamma0=0.1 gave %.17g, want 1/11", at_tenth)};

    return {true, fmt("50 configs x 1e6 draws, max |z| = %.2f (limit 3.0); "
                      "symmetric cases 0.5 and 1/11 exact",
                      worst_z)};
}

// ---------------------------------------------------------------- 2 ----
// The posynomial feasibility indicator and the closed-form threshold
// test are the same inequality; they may only disagree within 1e-12 of
// the boundary.
Outcome criterion2() {
    std::mt19937_64 rng(kMasterSeed + 2);

    constexpr std::size_t kInstances = 10000;
    std::size_t checked = 0;
    for (std::size_t c = 0; c < kInstances; ++c) {
        const std::size_t K = pick_in(rng, 2, 5);
        SystemConfig cfg = SystemConfig::make(K);
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < K; ++j)
                cfg.mean_gains(i, j) = log10_uniform(rng, -1.0, 1.0);
        cfg.gamma0 = log10_uniform(rng, -2.0, 1.0);
        cfg.p0 = 0.02 + 0.96 * u01(rng);
        PowerAllocation powers(K, 1.0);
        for (std::size_t i = 0; i < K; ++i) powers[i] = log10_uniform(rng, -0.3, 0.6);

        for (std::size_t k = 0; k < K; ++k) {
            const bool indicator = outage_constraint_ok(cfg, powers, k);
            const double closed = outage_closed_form(cfg, powers, k);
            const bool threshold = closed <= cfg.p0;
            ++checked;
            if (indicator != threshold && std::fabs(closed - cfg.p0) > 1e-12)
                return {false,
                        fmt("instance %zu user %zu: indicator %d vs closed %.17g <= p0 %.17g, "
                            "margin %.3g",
                            c, k, static_cast<int>(indicator), closed, cfg.p0,
                            std::fabs(closed - cfg.p0))};
        }
    }
    return {true, fmt("%zu user-level comparisons over 10000 instances, "
                      "no disagreement beyond 1e-12 of the boundary",
                      checked)};
}

// ---------------------------------------------------------------- 3 ----
// The bisection solver matches an exhaustive grid oracle within 2%
// relative on the max-min SINR, and its witnesses always satisfy the
// exact feasibility indicator.
Outcome criterion3() {
    std::mt19937_64 rng(kMasterSeed + 3);
    double worst_rel = 0.0;
    std::size_t feasible_count = 0, infeasible_count = 0;

    auto run_batch = [&](std::size_t K, std::size_t instances,
                         std::size_t levels) -> Outcome {
        for (std::size_t c = 0; c < instances; ++c) {
            SystemConfig cfg = SystemConfig::make(K);
            for (std::size_t i = 0; i < K; ++i)
                for (std::size_t j = 0; j < K; ++j)
                    cfg.mean_gains(i, j) = i == j ? log10_uniform(rng, -0.3, 0.3)    // 0.5..2
                                                  : log10_uniform(rng, -1.7, -0.3);  // 0.02..0.5
            cfg.p0 = 0.1 + 0.4 * u01(rng);
            cfg.gamma0 = log10_uniform(rng, -1.3, -0.3);  // 0.05..0.5

            const GridOracleResult oracle = grid_oracle(cfg.mean_gains, cfg, levels);
            const GPSolution sol = solve_maxmin_gp(cfg.mean_gains, cfg);

            if (!oracle.any_feasible) {
                ++infeasible_count;
                if (sol.feasible)
                    // A solver witness on an oracle-infeasible instance must
                    // still verify; the indicator is the judge either way.
                    for (std::size_t k = 0; k < K; ++k)
                        if (!outage_constraint_ok(cfg, sol.powers, k))
                            return {false, fmt("K=%zu instance %zu: infeasible-grid witness "
                                               "fails the indicator",
                                               K, c)};
                continue;
            }
            ++feasible_count;
            if (!sol.feasible)
                return {false, fmt("K=%zu instance %zu: oracle feasible (eta %.4f) but "
                                   "solver says infeasible",
                                   K, c, oracle.best_min_sinr)};
            const double rel =
                std::fabs(sol.eta - oracle.best_min_sinr) / oracle.best_min_sinr;
            worst_rel = std::max(worst_rel, rel);
            if (rel > 0.02)
                return {false, fmt("K=%zu instance %zu: solver eta %.6f vs oracle %.6f, "
                                   "relative gap %.3f%% > 2%%",
                                   K, c, sol.eta, oracle.best_min_sinr, 100.0 * rel)};
            for (std::size_t k = 0; k < K; ++k)
                if (!outage_constraint_ok(cfg, sol.powers, k))
                    return {false,
                            fmt("K=%zu instance %zu: witness violates the outage indicator "
                                "for user %zu",
                                K, c, k)};
        }
        return {true, ""};
    };

    if (Outcome o = run_batch(2, 20, 200); !o.pass) return o;
    if (Outcome o = run_batch(3, 10, 60); !o.pass) return o;
    return {true, fmt("%zu feasible + %zu infeasible instances, worst eta gap %.3f%% "
                      "(limit 2%%), all witnesses verified",
                      feasible_count, infeasible_count, 100.0 * worst_rel)};
}

// ---------------------------------------------------------------- 4 ----
// Gradient correctness by central finite differences on a small net, and
// optimizer effectiveness: 200 RMSProp steps shrink a fixed regression
// loss by at least 50x.
Outcome criterion4() {
    Rng rng = make_rng(kMasterSeed + 4);
    QNetworkParams net = init_params_with_dims({4, 5, 3}, rng);

    std::vector<Transition> batch;
    for (int i = 0; i < 8; ++i) {
        Transition t;
        for (int d = 0; d < 4; ++d) t.state.push_back(2.0 * uniform01(rng) - 1.0);
        t.action = static_cast<std::size_t>(uniform_index(rng, 3));
        t.reward = uniform01(rng);
        t.terminal = true;  // targets equal rewards; no target net involved
        t.next_state = t.state;
        batch.push_back(t);
    }
    const std::vector<double> targets = td_targets(batch, net, 0.9);
    const LossGrad lg = loss_and_gradient(net, batch, targets, LossMode::sum);

    const double h = 1e-5;
    double worst_rel = 0.0;
    auto fd_check = [&](double& slot, double analytic) -> bool {
        const double keep = slot;
        slot = keep + h;
        const double up = loss_and_gradient(net, batch, targets, LossMode::sum).loss;
        slot = keep - h;
        const double down = loss_and_gradient(net, batch, targets, LossMode::sum).loss;
        slot = keep;
        const double numeric = (up - down) / (2.0 * h);
        const double rel = std::fabs(analytic - numeric) /
                           std::max(std::fabs(numeric), 1e-8);
        worst_rel = std::max(worst_rel, rel);
        return rel <= 1e-5;
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Layer& lay = net.layers[l];
        for (std::size_t r = 0; r < lay.W.rows(); ++r)
            for (std::size_t c = 0; c < lay.W.cols(); ++c)
                if (!fd_check(lay.W(r, c), lg.grad[l].W(r, c)))
                    return {false, fmt("layer %zu W(%zu,%zu): finite-difference mismatch, "
                                       "relative error %.3g > 1e-5",
                                       l, r, c, worst_rel)};
        for (std::size_t b = 0; b < lay.b.size(); ++b)
            if (!fd_check(lay.b[b], lg.grad[l].b[b]))
                return {false, fmt("layer %zu b[%zu]: finite-difference mismatch, "
                                   "relative error %.3g > 1e-5",
                                   l, b, worst_rel)};
    }

    // Fixed regression task: fit a frozen random batch of TD targets.
    Rng rng2 = make_rng(kMasterSeed + 40);
    QNetworkParams reg = init_params(8, 5, rng2);
    std::vector<Transition> task;
    for (int i = 0; i < 32; ++i) {
        Transition t;
        for (int d = 0; d < 8; ++d) t.state.push_back(2.0 * uniform01(rng2) - 1.0);
        t.action = static_cast<std::size_t>(uniform_index(rng2, 5));
        t.reward = 2.0 * uniform01(rng2) - 1.0;
        t.terminal = true;
        t.next_state = t.state;
        task.push_back(t);
    }
    const std::vector<double> task_targets = td_targets(task, reg, 0.9);
    RmspropState opt = make_rmsprop(reg);
    const double initial = loss_and_gradient(reg, task, task_targets, LossMode::sum).loss;
    for (int step = 0; step < 200; ++step) {
        LossGrad g = loss_and_gradient(reg, task, task_targets, LossMode::sum);
        rmsprop_step(reg, opt, g.grad);
    }
    const double final_loss = loss_and_gradient(reg, task, task_targets, LossMode::sum).loss;
    const double ratio = initial / std::max(final_loss, 1e-300);
    if (ratio < 50.0)
        return {false, fmt("loss %.6g -> %.6g after 200 steps, ratio %.1fx < 50x",
                           initial, final_loss, ratio)};
    return {true, fmt("finite differences: worst relative error %.2g (limit 1e-5); "
                      "200 optimizer steps: loss %.4g -> %.4g (%.0fx, limit 50x)",
                      worst_rel, initial, final_loss, ratio)};
}

// ----------------------------------------------------------- 5 to 8 ----
// Learned-policy criteria. These train agents through the same sweep
// harness the CLI uses; constants frozen from pilot runs at kMasterSeed.

SweepSpec learned_spec(SweptParameter parameter, std::vector<double> values,
                       SystemConfig base, std::vector<Method> methods) {
    SweepSpec spec;
    spec.parameter = parameter;
    spec.values = std::move(values);
    spec.realizations = 500;
    spec.methods = std::move(methods);
    spec.master_seed = kMasterSeed;
    spec.base = std::move(base);
    return spec;
}

double row_mean(const SweepResult& r, std::size_t value_index, Method m) {
    for (std::size_t i = 0; i < r.rows.size(); ++i)
        if (r.rows[i].method == method_name(m) &&
            i / r.spec.methods.size() == value_index)
            return r.rows[i].mean;
    throw std::logic_error("row_mean: row not found");
}

Outcome criterion5() {
    SystemConfig base = SystemConfig::make(4);
    base.p0 = 0.3;  // gamma0 -10 dB, 4 dB budget, 5 levels are the defaults
    SweepSpec spec = learned_spec(SweptParameter::p_max, {db_to_linear(4.0)}, base,
                                  {Method::dqn, Method::gp});
    const SweepResult r = run_sweep(spec);
    const double dqn = row_mean(r, 0, Method::dqn);
    const double gp = row_mean(r, 0, Method::gp);
    if (!(dqn >= gp))
        return {false, fmt("trained policy %.4f vs max-min baseline %.4f bits/s/Hz "
                           "over 500 paired draws",
                           dqn, gp)};
    return {true, fmt("trained policy %.4f >= max-min baseline %.4f bits/s/Hz "
                      "(+%.1f%%, 500 paired draws, K=4, 5 levels, 3000 episodes)",
                      dqn, gp, 100.0 * (dqn / gp - 1.0))};
}

Outcome criterion6() {
    // K=3 keeps the low end of the outage-budget sweep informative: at 0.1
    // some per-user reliability checks still pass, so the agent has a
    // gradient to climb, while the budget keeps pruning actions up through
    // 0.3. At K=4 a 0.1 budget admits nothing (reward identically zero) and
    // at K=2 the constraint stops binding almost immediately.
    SystemConfig base = SystemConfig::make(3);
    SweepSpec spec = learned_spec(SweptParameter::p0, {0.1, 0.3, 0.5, 0.7, 0.9}, base,
                                  {Method::dqn, Method::gp});
    const SweepResult r = run_sweep(spec);

    std::vector<double> dqn_means, gp_values, gp_means;
    for (std::size_t vi = 0; vi < spec.values.size(); ++vi)
        dqn_means.push_back(row_mean(r, vi, Method::dqn));
    for (std::size_t i = 0; i < r.rows.size(); ++i)
        if (r.rows[i].method == method_name(Method::gp) && !r.rows[i].infeasible) {
            gp_values.push_back(r.rows[i].swept_value);
            gp_means.push_back(r.rows[i].mean);
        }

    const double rho_dqn = spearman_rho(spec.values, dqn_means);

    // A baseline that does not react to the swept value produces means
    // differing only by solver wobble; bucket them at half a percent of
    // the curve scale so those near-ties rank as ties.
    double scale = 0.0;
    for (double m : gp_means) scale += std::fabs(m);
    scale = std::max(scale / std::max<std::size_t>(gp_means.size(), 1), 1e-12);
    std::vector<double> bucketed;
    for (double m : gp_means) bucketed.push_back(std::round(m / (0.005 * scale)));
    const double rho_gp = spearman_rho(gp_values, bucketed);

    if (!(rho_dqn >= 0.7))
        return {false, fmt("trained-policy Spearman rho %.3f < 0.7 over the outage-budget "
                           "sweep (means %.4f..%.4f)",
                           rho_dqn, dqn_means.front(), dqn_means.back())};
    if (!(rho_gp <= 0.0))
        return {false, fmt("max-min baseline Spearman rho %.3f > 0 (%zu feasible points)",
                           rho_gp, gp_means.size())};
    return {true, fmt("trained policy rho %.3f (>= 0.7), means %.4f -> %.4f; "
                      "baseline rho %.3f (<= 0) over %zu feasible points",
                      rho_dqn, dqn_means.front(), dqn_means.back(), rho_gp,
                      gp_means.size())};
}

Outcome criterion7() {
    SystemConfig lo = SystemConfig::make(2);
    lo.p0 = 0.3;
    SystemConfig hi = lo;
    hi.p_max = db_to_linear(8.0);

    SweepSpec spec_lo =
        learned_spec(SweptParameter::K, {2.0, 3.0, 4.0}, lo, {Method::dqn});
    SweepSpec spec_hi =
        learned_spec(SweptParameter::K, {2.0, 3.0, 4.0}, hi, {Method::dqn});
    const SweepResult rl = run_sweep(spec_lo);
    const SweepResult rh = run_sweep(spec_hi);

    std::vector<double> low, high;
    for (std::size_t vi = 0; vi < 3; ++vi) {
        low.push_back(row_mean(rl, vi, Method::dqn));
        high.push_back(row_mean(rh, vi, Method::dqn));
    }
    for (std::size_t i = 1; i < 3; ++i) {
        if (low[i] > low[i - 1] * 1.02)
            return {false, fmt("4 dB curve rises K=%zu->%zu: %.4f -> %.4f (+2%% slack exceeded)",
                               i + 1, i + 2, low[i - 1], low[i])};
        if (high[i] > high[i - 1] * 1.02)
            return {false, fmt("8 dB curve rises K=%zu->%zu: %.4f -> %.4f (+2%% slack exceeded)",
                               i + 1, i + 2, high[i - 1], high[i])};
    }
    for (std::size_t i = 0; i < 3; ++i)
        if (!(high[i] > low[i]))
            return {false, fmt("K=%zu: 8 dB budget %.4f not above 4 dB budget %.4f",
                               i + 2, high[i], low[i])};
    return {true, fmt("4 dB curve %.3f/%.3f/%.3f and 8 dB curve %.3f/%.3f/%.3f over "
                      "K=2/3/4: both non-increasing, larger budget above at every K",
                      low[0], low[1], low[2], high[0], high[1], high[2])};
}

Outcome criterion8() {
    SystemConfig base = SystemConfig::make(2);
    SweepSpec spec = learned_spec(SweptParameter::p0, {0.1}, base,
                                  {Method::dqn, Method::dqn_no_constraint});
    const SweepResult r = run_sweep(spec);

    double sum_con = 0, sum_unc = 0, viol_con = 0, viol_unc = 0;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        if (r.rows[i].method == method_name(Method::dqn)) {
            sum_con = r.rows[i].mean;
            viol_con = r.details[i].violation_frequency;
        } else if (r.rows[i].method == method_name(Method::dqn_no_constraint)) {
            sum_unc = r.rows[i].mean;
            viol_unc = r.details[i].violation_frequency;
        }
    }
    if (!(sum_unc >= sum_con))
        return {false, fmt("reward without the reliability mask gave sum-rate %.4f < "
                           "masked %.4f",
                           sum_unc, sum_con)};
    if (!(viol_unc > viol_con))
        return {false, fmt("violation frequency %.3f (unmasked) not strictly above %.3f "
                           "(masked)",
                           viol_unc, viol_con)};
    return {true, fmt("unmasked reward: sum-rate %.4f >= %.4f and violation frequency "
                      "%.3f > %.3f (tight 0.1 outage budget, K=2)",
                      sum_unc, sum_con, viol_unc, viol_con)};
}

// ---------------------------------------------------------------- 9 ----
// Manifest re-runs of the command line tool reproduce CSV outputs byte
// for byte (and the training checkpoint too).
std::string file_bytes(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome criterion9(const std::string& cli) {
    if (cli.empty()) return {false, "needs --cli <path to the icpower binary>"};
    const fs::path root = fs::temp_directory_path() / "icpower_acceptance_c9";
    fs::remove_all(root);
    fs::create_directories(root);

    auto run = [&](const std::string& args) {
        const std::string cmd =
            "\"" + cli + "\" " + args + " > \"" + (root / "cmd.log").string() + "\" 2>&1";
        if (std::system(cmd.c_str()) != 0)
            throw std::runtime_error("command failed: icpower " + args + "\n" +
                                     file_bytes(root / "cmd.log"));
    };
    auto same = [&](const fs::path& a, const fs::path& b) {
        return file_bytes(a) == file_bytes(b);
    };
    auto dir = [&](const char* name) {
        fs::create_directories(root / name);
        return (root / name).string();
    };

    const std::string t1 = dir("t1"), t2 = dir("t2");
    run("train --seed 401 -K 2 --levels 3 --episodes 8 --out-dir \"" + t1 + "\"");
    run("train --config \"" + t1 + "/train_manifest.json\" --out-dir \"" + t2 + "\"");
    if (!same(t1 + "/episodes.csv", t2 + "/episodes.csv"))
        return {false, "training log differs after a manifest re-run"};
    if (!same(t1 + "/checkpoint.bin", t2 + "/checkpoint.bin"))
        return {false, "checkpoint differs after a manifest re-run"};

    const std::string e1 = dir("e1"), e2 = dir("e2");
    run("evaluate --checkpoint \"" + t1 + "/checkpoint.bin\" --seed 402 -K 2 --levels 3 "
        "--realizations 40 --out-dir \"" + e1 + "\"");
    run("evaluate --config \"" + e1 + "/evaluate_manifest.json\" --out-dir \"" + e2 + "\"");
    if (!same(e1 + "/evaluate.csv", e2 + "/evaluate.csv"))
        return {false, "evaluation summary differs after a manifest re-run"};

    const std::string s1 = dir("s1"), s2 = dir("s2");
    run("sweep --seed 403 --parameter p_max --values 2 4 "
        "--methods dqn gp wmmse random equal-power --realizations 30 -K 2 --levels 3 "
        "--episodes 8 --svg --out-dir \"" + s1 + "\"");
    run("sweep --config \"" + s1 + "/sweep_manifest.json\" --out-dir \"" + s2 + "\"");
    if (!same(s1 + "/sweep.csv", s2 + "/sweep.csv"))
        return {false, "sweep table differs after a manifest re-run"};
    if (!same(s1 + "/sweep.svg", s2 + "/sweep.svg"))
        return {false, "sweep plot differs after a manifest re-run"};

    fs::remove_all(root);
    return {true, "train, evaluate, and sweep re-runs from their manifests reproduced "
                  "every CSV, the checkpoint, and the plot byte-for-byte"};
}

}  // namespace

int main(int argc, char** argv) {
    int selected = 0;  // 0 means all
    std::string cli;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            selected = std::atoi(argv[++i]);
        } else if (arg == "--cli" && i + 1 < argc) {
            cli = argv[++i];
        } else {
            std::fprintf(stderr, "usage: acceptance [--criterion N] [--cli PATH]\n");
            return 2;
        }
    }

    struct Entry {
        int id;
        const char* title;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {1, "closed-form outage matches Monte-Carlo", &criterion1},
        {2, "feasibility indicator matches the outage threshold", &criterion2},
        {3, "max-min solver certified against the grid oracle", &criterion3},
        {4, "gradients check out and the optimizer converges", &criterion4},
        {5, "trained policy beats the max-min baseline", &criterion5},
        {6, "sum-rate grows with the outage budget, baseline flat", &criterion6},
        {7, "sum-rate falls with user count, rises with power budget", &criterion7},
        {8, "dropping the reliability mask trades violations for rate", &criterion8},
    };

    bool all_pass = true;
    auto report = [&](int id, const char* title, const Outcome& o) {
        std::printf("[%s] criterion %d: %s: %s\n", o.pass ? "PASS" : "FAIL", id, title,
                    o.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    };

    for (const Entry& e : entries) {
        if (selected != 0 && selected != e.id) continue;
        Outcome o;
        try {
            o = e.fn();
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        report(e.id, e.title, o);
    }
    if (selected == 0 || selected == 9) {
        Outcome o;
        try {
            o = criterion9(cli);
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        report(9, "manifest re-runs reproduce outputs bit-exactly", o);
    }
    return all_pass ? 0 : 1;
}
