// Command-line front end. All power and SINR quantities cross this
// boundary in dB and are converted to linear scale exactly once; manifests
// keep the dB-domain numbers so a re-run parses byte-identical inputs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "icpower/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace icpower;

namespace {

constexpr int kManifestVersion = 1;

// dB-domain mirror of SystemConfig; this is what manifests persist.
struct SystemSpec {
    std::size_t K = 4;
    double gamma0_db = -10.0;
    double p0 = 0.3;
    double p_min_db = 0.0;
    double p_max_db = 4.0;
    std::size_t n_levels = 5;
    std::vector<double> noise;                     // empty: unit noise
    std::vector<std::vector<double>> mean_gains;   // empty: unit gains

    SystemConfig to_config() const {
        SystemConfig cfg = SystemConfig::make(K);
        cfg.gamma0 = db_to_linear(gamma0_db);
        cfg.p0 = p0;
        cfg.p_min = db_to_linear(p_min_db);
        cfg.p_max = db_to_linear(p_max_db);
        cfg.n_levels = n_levels;
        if (!noise.empty()) {
            if (noise.size() != K) throw std::invalid_argument("noise length must equal K");
            cfg.noise = noise;
        }
        if (!mean_gains.empty()) {
            if (mean_gains.size() != K)
                throw std::invalid_argument("mean_gains must be a KxK matrix");
            for (std::size_t r = 0; r < K; ++r) {
                if (mean_gains[r].size() != K)
                    throw std::invalid_argument("mean_gains must be a KxK matrix");
                for (std::size_t c = 0; c < K; ++c) cfg.mean_gains(r, c) = mean_gains[r][c];
            }
        }
        cfg.validate();
        return cfg;
    }
};

void to_json(json& j, const SystemSpec& s) {
    j = json{{"K", s.K},           {"gamma0_db", s.gamma0_db}, {"p0", s.p0},
             {"p_min_db", s.p_min_db}, {"p_max_db", s.p_max_db},   {"n_levels", s.n_levels}};
    if (!s.noise.empty()) j["noise"] = s.noise;
    if (!s.mean_gains.empty()) j["mean_gains"] = s.mean_gains;
}

void from_json(const json& j, SystemSpec& s) {
    s.K = j.value("K", s.K);
    s.gamma0_db = j.value("gamma0_db", s.gamma0_db);
    s.p0 = j.value("p0", s.p0);
    s.p_min_db = j.value("p_min_db", s.p_min_db);
    s.p_max_db = j.value("p_max_db", s.p_max_db);
    s.n_levels = j.value("n_levels", s.n_levels);
    s.noise = j.value("noise", std::vector<double>{});
    s.mean_gains = j.value("mean_gains", std::vector<std::vector<double>>{});
}

std::string reward_mode_name(RewardMode m) {
    switch (m) {
        case RewardMode::masked_sum: return "masked-sum";
        case RewardMode::all_or_nothing: return "all-or-nothing";
        case RewardMode::unconstrained: return "unconstrained";
    }
    throw std::logic_error("unknown reward mode");
}

RewardMode reward_mode_from_name(const std::string& name) {
    for (RewardMode m :
         {RewardMode::masked_sum, RewardMode::all_or_nothing, RewardMode::unconstrained})
        if (reward_mode_name(m) == name) return m;
    throw std::invalid_argument("unknown reward mode: " + name);
}

}  // namespace

// The TrainingConfig serializers sit beside the type's namespace so that
// nlohmann's adl_serializer can find them.
namespace icpower {

void to_json(json& j, const TrainingConfig& t) {
    j = json{{"episodes", t.episodes},
             {"steps_per_episode", t.steps_per_episode},
             {"epsilon_start", t.epsilon_start},
             {"epsilon_decay", t.epsilon_decay},
             {"epsilon_floor", t.epsilon_floor},
             {"batch_size", t.batch_size},
             {"target_sync_period", t.target_sync_period},
             {"discount", t.discount},
             {"replay_capacity", t.replay_capacity},
             {"learning_rate", t.learning_rate},
             {"grad_clip", t.grad_clip},
             {"reward_mode", reward_mode_name(t.reward_mode)},
             {"loss_mode", t.loss_mode == LossMode::sum ? "sum" : "mean"}};
}

void from_json(const json& j, TrainingConfig& t) {
    t.episodes = j.value("episodes", t.episodes);
    t.steps_per_episode = j.value("steps_per_episode", t.steps_per_episode);
    t.epsilon_start = j.value("epsilon_start", t.epsilon_start);
    t.epsilon_decay = j.value("epsilon_decay", t.epsilon_decay);
    t.epsilon_floor = j.value("epsilon_floor", t.epsilon_floor);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.target_sync_period = j.value("target_sync_period", t.target_sync_period);
    t.discount = j.value("discount", t.discount);
    t.replay_capacity = j.value("replay_capacity", t.replay_capacity);
    t.learning_rate = j.value("learning_rate", t.learning_rate);
    t.grad_clip = j.value("grad_clip", t.grad_clip);
    t.reward_mode = reward_mode_from_name(j.value("reward_mode", reward_mode_name(t.reward_mode)));
    const std::string lm = j.value("loss_mode", t.loss_mode == LossMode::sum ? "sum" : "mean");
    if (lm != "sum" && lm != "mean") throw std::invalid_argument("unknown loss mode: " + lm);
    t.loss_mode = lm == "sum" ? LossMode::sum : LossMode::mean;
}

}  // namespace icpower

namespace {

// Sweep description in CLI domain: p_max values in dB, p0 and K verbatim.
struct SweepCliSpec {
    std::string parameter = "p_max";
    std::vector<double> values;
    std::size_t realizations = 500;
    std::vector<std::string> methods;  // empty: all
};

void to_json(json& j, const SweepCliSpec& s) {
    j = json{{"parameter", s.parameter},
             {"values", s.values},
             {"realizations", s.realizations},
             {"methods", s.methods}};
}

void from_json(const json& j, SweepCliSpec& s) {
    s.parameter = j.value("parameter", s.parameter);
    s.values = j.value("values", s.values);
    s.realizations = j.value("realizations", s.realizations);
    s.methods = j.value("methods", s.methods);
}

SweepSpec build_sweep_spec(const SweepCliSpec& cli, const SystemSpec& sys,
                           const TrainingConfig& training, std::uint64_t seed) {
    SweepSpec spec;
    spec.parameter = parameter_from_name(cli.parameter);
    for (double v : cli.values)
        spec.values.push_back(spec.parameter == SweptParameter::p_max ? db_to_linear(v) : v);
    spec.realizations = cli.realizations;
    if (cli.methods.empty()) {
        spec.methods = all_methods();
    } else {
        spec.methods.clear();
        for (const std::string& name : cli.methods) spec.methods.push_back(method_from_name(name));
    }
    spec.master_seed = seed;
    spec.base = sys.to_config();
    spec.training = training;
    spec.validate();
    return spec;
}

// Shared mutable state each subcommand resolves from defaults, then the
// JSON config, then explicit CLI flags, in that order.
struct CommonState {
    SystemSpec system;
    TrainingConfig training;
    SweepCliSpec sweep;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string config_path;
    std::string checkpoint_path;

    // evaluate/sweep settings that must survive a manifest round trip
    std::size_t eval_realizations = 500;
    double eval_epsilon = 0.01;
    std::string eval_reward_mode = "masked-sum";
    bool svg = false;

    std::string resolved_out_dir() const {
        if (!out_dir.empty()) return out_dir;
        if (const char* env = std::getenv("ICPOWER_OUT_DIR"); env && *env) return env;
        return ".";
    }
};

void load_config_file(CommonState& st) {
    if (st.config_path.empty()) return;
    std::ifstream f(st.config_path);
    if (!f) throw std::runtime_error("cannot open config: " + st.config_path);
    json j;
    f >> j;
    if (j.contains("system")) st.system = j["system"].get<SystemSpec>();
    if (j.contains("training")) st.training = j["training"].get<TrainingConfig>();
    if (j.contains("sweep")) st.sweep = j["sweep"].get<SweepCliSpec>();
    if (j.contains("seed")) st.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("checkpoint")) st.checkpoint_path = j["checkpoint"].get<std::string>();
    if (j.contains("realizations")) st.eval_realizations = j["realizations"].get<std::size_t>();
    if (j.contains("epsilon")) st.eval_epsilon = j["epsilon"].get<double>();
    if (j.contains("reward_mode")) st.eval_reward_mode = j["reward_mode"].get<std::string>();
    if (j.contains("svg")) st.svg = j["svg"].get<bool>();
}

// System/seed flags shared by every subcommand. Flags always override the
// config file because the file is loaded before flag values are applied.
struct SystemFlags {
    std::optional<std::size_t> K, n_levels;
    std::optional<double> gamma0_db, p0, p_min_db, p_max_db;

    void attach(CLI::App* cmd) {
        cmd->add_option("--users,-K", K, "user pair count");
        cmd->add_option("--gamma0-db", gamma0_db, "minimum SINR threshold [dB]");
        cmd->add_option("--p0", p0, "tolerable outage probability in (0,1)");
        cmd->add_option("--p-min-db", p_min_db, "minimum transmit power [dB]");
        cmd->add_option("--p-max-db", p_max_db, "maximum transmit power [dB]");
        cmd->add_option("--levels", n_levels, "discrete power levels per user");
    }
    void apply(SystemSpec& s) const {
        if (K) s.K = *K;
        if (gamma0_db) s.gamma0_db = *gamma0_db;
        if (p0) s.p0 = *p0;
        if (p_min_db) s.p_min_db = *p_min_db;
        if (p_max_db) s.p_max_db = *p_max_db;
        if (n_levels) s.n_levels = *n_levels;
    }
};

void write_manifest(const fs::path& path, const json& manifest) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write manifest: " + path.string());
    f << manifest.dump(2) << "\n";
}

json base_manifest(const std::string& command, const CommonState& st) {
    json j;
    j["format_version"] = kManifestVersion;
    j["command"] = command;
    j["seed"] = st.seed;
    j["system"] = st.system;
    return j;
}

std::string episodes_csv(const TrainResult& result) {
    std::string out = "episode,epsilon,mean_reward,mean_loss\n";
    char buf[160];
    for (const EpisodeLogEntry& e : result.log) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", e.episode, e.epsilon,
                      e.mean_reward, e.mean_loss);
        out += buf;
    }
    return out;
}

int cmd_train(const CommonState& st) {
    const fs::path out(st.resolved_out_dir());
    fs::create_directories(out);
    const SystemConfig cfg = st.system.to_config();

    Rng rng = make_rng(st.seed);
    const TrainResult result = train(cfg, st.training, rng);

    QNetworkParams params = result.params;
    params.init_seed = st.seed;
    save_checkpoint((out / "checkpoint.bin").string(), params);
    write_text_file((out / "episodes.csv").string(), episodes_csv(result));
    json manifest = base_manifest("train", st);
    manifest["training"] = st.training;
    write_manifest(out / "train_manifest.json", manifest);

    double tail = 0.0;
    const std::size_t tail_n = std::min<std::size_t>(100, result.log.size());
    for (std::size_t i = result.log.size() - tail_n; i < result.log.size(); ++i)
        tail += result.log[i].mean_reward;
    std::printf("trained %d episodes (%llu gradient steps), final epsilon %.4f\n",
                st.training.episodes, static_cast<unsigned long long>(result.gradient_steps),
                result.final_epsilon);
    std::printf("trailing-%zu-episode mean reward %.6f\n", tail_n, tail / tail_n);
    std::printf("wrote %s, %s, %s\n", (out / "checkpoint.bin").c_str(),
                (out / "episodes.csv").c_str(), (out / "train_manifest.json").c_str());
    return 0;
}

int cmd_evaluate(const CommonState& st) {
    const std::size_t realizations = st.eval_realizations;
    const double epsilon = st.eval_epsilon;
    const std::string& reward_mode = st.eval_reward_mode;
    if (st.checkpoint_path.empty())
        throw std::runtime_error("evaluate: --checkpoint is required (or in the manifest)");
    const fs::path out(st.resolved_out_dir());
    fs::create_directories(out);
    const SystemConfig cfg = st.system.to_config();
    const QNetworkParams params = load_checkpoint(st.checkpoint_path);
    if (params.dims.front() != state_dim(cfg) || params.dims.back() != action_count(cfg))
        throw std::runtime_error("evaluate: checkpoint shape does not match the configuration");

    Rng channel_rng = make_rng(channel_seed(st.seed));
    Rng policy_rng = make_rng(policy_seed(st.seed, Method::dqn));
    const EvaluationResult r = evaluate_policy(params, cfg, realizations, channel_rng, policy_rng,
                                               epsilon, reward_mode_from_name(reward_mode));

    char buf[256];
    std::string csv = "mean_sum_rate,mean_min_rate,violation_frequency,mean_reward,realizations\n";
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%zu\n", r.mean_sum_rate,
                  r.mean_min_rate, r.violation_frequency, r.mean_reward, r.realizations);
    csv += buf;
    write_text_file((out / "evaluate.csv").string(), csv);

    json manifest = base_manifest("evaluate", st);
    manifest["checkpoint"] = st.checkpoint_path;
    manifest["realizations"] = realizations;
    manifest["epsilon"] = epsilon;
    manifest["reward_mode"] = reward_mode;
    write_manifest(out / "evaluate_manifest.json", manifest);

    std::printf("mean sum-rate        %.6f bits/s/Hz\n", r.mean_sum_rate);
    std::printf("mean min-rate        %.6f bits/s/Hz\n", r.mean_min_rate);
    std::printf("violation frequency  %.4f\n", r.violation_frequency);
    std::printf("mean reward          %.6f\n", r.mean_reward);
    return 0;
}

int cmd_sweep(const CommonState& st) {
    const bool svg = st.svg;
    const fs::path out(st.resolved_out_dir());
    fs::create_directories(out);
    const SweepSpec spec = build_sweep_spec(st.sweep, st.system, st.training, st.seed);
    const SweepResult result = run_sweep(spec);

    write_text_file((out / "sweep.csv").string(), sweep_csv(result));
    json manifest = base_manifest("sweep", st);
    manifest["training"] = st.training;
    manifest["sweep"] = st.sweep;
    manifest["svg"] = svg;
    write_manifest(out / "sweep_manifest.json", manifest);
    if (svg) {
        const std::string label = spec.parameter == SweptParameter::p_max
                                      ? "maximum transmit power [dB]"
                                      : parameter_name(spec.parameter);
        SweepResult labeled = result;
        if (spec.parameter == SweptParameter::p_max)
            for (std::size_t i = 0; i < labeled.rows.size(); ++i)
                labeled.rows[i].swept_value = st.sweep.values[i / spec.methods.size()];
        write_text_file((out / "sweep.svg").string(), sweep_svg(labeled, label));
    }

    for (const SweepRow& row : result.rows) {
        if (row.infeasible)
            std::printf("%-10g %-18s infeasible\n", row.swept_value, row.method.c_str());
        else
            std::printf("%-10g %-18s %.4f +/- %.4f (n=%zu)\n", row.swept_value,
                        row.method.c_str(), row.mean, row.std_error, row.n);
    }
    std::printf("wrote %s\n", (out / "sweep.csv").c_str());
    return 0;
}

int cmd_verify_outage(const CommonState& st, std::size_t trials, std::size_t samples) {
    const SystemConfig cfg = st.system.to_config();
    Rng rng = make_rng(st.seed);
    const OutageVerifyReport r = verify_outage(cfg, trials, samples, rng);
    std::printf("%zu trials x %zu samples: max |z| = %.3f -> %s\n", trials, samples, r.max_abs_z,
                r.pass ? "PASS" : "FAIL");
    return r.pass ? 0 : 1;
}

int cmd_verify_gp(const CommonState& st, std::size_t instances, std::size_t grid_levels) {
    const SystemConfig cfg = st.system.to_config();
    Rng rng = make_rng(st.seed);
    const GpVerifyReport r = verify_gp(cfg, instances, grid_levels, rng);
    std::printf("%zu instances (K=%zu, %zu-level oracle): max shortfall %.5f, "
                "verdict mismatches %zu, witness violations %zu -> %s\n",
                r.instances, r.K, grid_levels, r.max_shortfall, r.verdict_mismatches,
                r.witness_violations, r.pass ? "PASS" : "FAIL");
    return r.pass ? 0 : 1;
}

int cmd_oracle(const CommonState& st, std::size_t levels) {
    const SystemConfig cfg = st.system.to_config();
    const GridOracleResult oracle = grid_oracle(cfg.mean_gains, cfg, levels);
    std::printf("grid oracle over %zu points (%zu levels/user)\n", oracle.points_evaluated, levels);
    if (!oracle.any_feasible) {
        std::printf("no feasible point under the reliability constraint\n");
    } else {
        std::printf("best min-SINR %.6f at powers", oracle.best_min_sinr);
        for (std::size_t k = 0; k < cfg.K; ++k) std::printf(" %.6f", oracle.best_min_sinr_powers[k]);
        std::printf("\nbest constrained sum-rate %.6f at powers", oracle.best_sum_rate);
        for (std::size_t k = 0; k < cfg.K; ++k) std::printf(" %.6f", oracle.best_sum_rate_powers[k]);
        std::printf("\n");
    }
    std::printf("best unconstrained sum-rate %.6f at powers", oracle.best_unconstrained_sum_rate);
    for (std::size_t k = 0; k < cfg.K; ++k)
        std::printf(" %.6f", oracle.best_unconstrained_sum_rate_powers[k]);
    std::printf("\n");

    const GPSolution sol = solve_maxmin_gp(cfg.mean_gains, cfg);
    if (sol.feasible) {
        std::printf("bisection solver: eta %.6f at powers", sol.eta);
        for (std::size_t k = 0; k < cfg.K; ++k) std::printf(" %.6f", sol.powers[k]);
        std::printf("\n");
    } else {
        std::printf("bisection solver: infeasible\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"outage-constrained power allocation toolkit"};
    app.require_subcommand(1);

    CommonState st;
    SystemFlags sysflags[6];
    std::optional<std::uint64_t> seed_flag[6];
    std::string out_flag[6], config_flag[6];

    auto attach_common = [&](CLI::App* cmd, int slot) {
        cmd->add_option("--config", config_flag[slot], "JSON config or manifest to load");
        cmd->add_option("--seed", seed_flag[slot], "master seed");
        cmd->add_option("--out-dir", out_flag[slot],
                        "output directory (default $ICPOWER_OUT_DIR or .)");
        sysflags[slot].attach(cmd);
    };

    CLI::App* c_train = app.add_subcommand("train", "train the DQN agent");
    attach_common(c_train, 0);
    std::optional<int> episodes_flag;
    std::optional<double> lr_flag;
    std::optional<std::string> reward_flag;
    c_train->add_option("--episodes", episodes_flag, "training episodes");
    c_train->add_option("--learning-rate", lr_flag, "optimizer step size");
    c_train->add_option("--reward-mode", reward_flag,
                        "masked-sum | all-or-nothing | unconstrained");

    CLI::App* c_eval = app.add_subcommand("evaluate", "evaluate a trained checkpoint");
    attach_common(c_eval, 1);
    std::string ckpt_flag;
    std::optional<std::size_t> eval_n;
    std::optional<double> eval_eps;
    std::optional<std::string> eval_mode;
    c_eval->add_option("--checkpoint", ckpt_flag, "checkpoint file from `train`");
    c_eval->add_option("--realizations", eval_n, "fresh channel draws to average");
    c_eval->add_option("--epsilon", eval_eps, "evaluation exploration level");
    c_eval->add_option("--reward-mode", eval_mode, "reward definition for the report");

    CLI::App* c_sweep = app.add_subcommand("sweep", "score methods across a parameter range");
    attach_common(c_sweep, 2);
    std::optional<std::string> param_flag;
    std::vector<double> values_flag;
    std::optional<std::size_t> realizations_flag;
    std::vector<std::string> methods_flag;
    std::optional<int> sweep_episodes_flag;
    bool svg = false;
    c_sweep->add_option("--parameter", param_flag, "p_max | p0 | K");
    c_sweep->add_option("--values", values_flag, "swept values (dB when sweeping p_max)")
        ->expected(-1);
    c_sweep->add_option("--realizations", realizations_flag, "channel draws per point");
    c_sweep->add_option("--methods", methods_flag, "subset of methods")->expected(-1);
    c_sweep->add_option("--episodes", sweep_episodes_flag, "training episodes for DQN arms");
    c_sweep->add_flag("--svg", svg, "also write an SVG plot");

    CLI::App* c_vo = app.add_subcommand("verify-outage", "closed form vs Monte-Carlo");
    attach_common(c_vo, 3);
    std::size_t vo_trials = 20, vo_samples = 100000;
    c_vo->add_option("--trials", vo_trials, "random configurations to test");
    c_vo->add_option("--mc-samples", vo_samples, "Monte-Carlo draws per trial");

    CLI::App* c_vg = app.add_subcommand("verify-gp", "bisection solver vs grid oracle");
    attach_common(c_vg, 4);
    std::size_t vg_instances = 20, vg_levels = 200;
    c_vg->add_option("--instances", vg_instances, "random instances to test");
    c_vg->add_option("--grid-levels", vg_levels, "oracle levels per user");

    CLI::App* c_or = app.add_subcommand("oracle", "exhaustive grid search on mean gains");
    attach_common(c_or, 5);
    std::size_t or_levels = 60;
    c_or->add_option("--grid-levels", or_levels, "levels per user");

    CLI11_PARSE(app, argc, argv);

    try {
        const CLI::App* sub = app.get_subcommands().front();
        const int slot = sub == c_train      ? 0
                         : sub == c_eval    ? 1
                         : sub == c_sweep   ? 2
                         : sub == c_vo      ? 3
                         : sub == c_vg      ? 4
                                            : 5;
        st.config_path = config_flag[slot];
        load_config_file(st);
        sysflags[slot].apply(st.system);
        if (seed_flag[slot]) st.seed = *seed_flag[slot];
        if (!out_flag[slot].empty()) st.out_dir = out_flag[slot];

        if (sub == c_train) {
            if (episodes_flag) st.training.episodes = *episodes_flag;
            if (lr_flag) st.training.learning_rate = *lr_flag;
            if (reward_flag) st.training.reward_mode = reward_mode_from_name(*reward_flag);
            return cmd_train(st);
        }
        if (sub == c_eval) {
            if (!ckpt_flag.empty()) st.checkpoint_path = ckpt_flag;
            if (eval_n) st.eval_realizations = *eval_n;
            if (eval_eps) st.eval_epsilon = *eval_eps;
            if (eval_mode) st.eval_reward_mode = *eval_mode;
            return cmd_evaluate(st);
        }
        if (sub == c_sweep) {
            if (param_flag) st.sweep.parameter = *param_flag;
            if (!values_flag.empty()) st.sweep.values = values_flag;
            if (realizations_flag) st.sweep.realizations = *realizations_flag;
            if (!methods_flag.empty()) st.sweep.methods = methods_flag;
            if (sweep_episodes_flag) st.training.episodes = *sweep_episodes_flag;
            if (svg) st.svg = true;
            return cmd_sweep(st);
        }
        if (sub == c_vo) return cmd_verify_outage(st, vo_trials, vo_samples);
        if (sub == c_vg) return cmd_verify_gp(st, vg_instances, vg_levels);
        return cmd_oracle(st, or_levels);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "icpower: %s\n", e.what());
        return 1;
    }
}
