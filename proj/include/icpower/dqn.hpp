#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "icpower/channel.hpp"
#include "icpower/config.hpp"
#include "icpower/net.hpp"
#include "icpower/outage.hpp"
#include "icpower/replay.hpp"

namespace icpower {

// How per-user reliability shapes the reward.
//   masked_sum: each user's rate counts only while that user's outage
//     condition holds (default).
//   all_or_nothing: the whole sum counts only when every user passes.
//   unconstrained: plain sum-rate, reliability ignored (ablation arm).
enum class RewardMode { masked_sum, all_or_nothing, unconstrained };

// Joint action space: one centralized agent picks a power digit per user.
inline std::size_t action_count(const SystemConfig& cfg) {
    std::size_t count = 1;
    for (std::size_t k = 0; k < cfg.K; ++k) {
        count *= cfg.n_levels;
        if (count > 10000)
            throw std::invalid_argument("action_count: n_levels^K exceeds 10^4, not desk-scale");
    }
    return count;
}

inline std::size_t state_dim(const SystemConfig& cfg) { return cfg.K * cfg.K + cfg.K; }

// State = log10 of the instantaneous gains clipped to [-6,6], flattened
// row-major, then previous powers rescaled to [0,1] over the power box.
inline std::vector<double> encode_state(const ChannelRealization& channel,
                                        const PowerAllocation& prev_powers,
                                        const SystemConfig& cfg) {
    if (channel.users() != cfg.K || prev_powers.size() != cfg.K)
        throw std::invalid_argument("encode_state: dimension mismatch");
    std::vector<double> s;
    s.reserve(state_dim(cfg));
    for (std::size_t k = 0; k < cfg.K; ++k)
        for (std::size_t j = 0; j < cfg.K; ++j)
            s.push_back(std::clamp(std::log10(channel.gains(k, j)), -6.0, 6.0));
    const double span = cfg.p_max - cfg.p_min;
    for (std::size_t k = 0; k < cfg.K; ++k)
        s.push_back(span > 0.0 ? (prev_powers[k] - cfg.p_min) / span : 0.0);
    return s;
}

// Base-n_levels digit expansion, most significant digit = user 0.
inline PowerAllocation decode_action(std::size_t action, const SystemConfig& cfg) {
    const std::size_t count = action_count(cfg);
    if (action >= count) throw std::out_of_range("decode_action: action index out of range");
    PowerAllocation p(cfg.K, cfg.p_min);
    for (std::size_t k = cfg.K; k-- > 0;) {
        const std::size_t digit = action % cfg.n_levels;
        action /= cfg.n_levels;
        p[k] = power_level(cfg.p_min, cfg.p_max, cfg.n_levels, digit);
    }
    return p;
}

// Rates come from the instantaneous draw; the reliability indicator from
// the mean gains. Nonnegative in every mode.
inline double compute_reward(const ChannelRealization& channel, const PowerAllocation& powers,
                             const SystemConfig& cfg, RewardMode mode = RewardMode::masked_sum) {
    const RateSummary rates = sum_rate(channel, powers, cfg.noise);
    if (mode == RewardMode::unconstrained) return rates.sum;
    const std::vector<bool> ok = outage_constraint_ok(cfg, powers);
    if (mode == RewardMode::all_or_nothing) {
        for (bool b : ok)
            if (!b) return 0.0;
        return rates.sum;
    }
    double reward = 0.0;
    for (std::size_t k = 0; k < cfg.K; ++k)
        if (ok[k]) reward += rates.per_user[k];
    return reward;
}

// One uniform draw decides explore/exploit; the explore branch draws one
// more. Greedy ties break to the first index.
inline std::size_t select_action(const std::vector<double>& q_values, double epsilon, Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("select_action: epsilon outside [0,1]");
    if (q_values.empty()) throw std::invalid_argument("select_action: empty q-values");
    if (uniform01(rng) < epsilon) return uniform_index(rng, q_values.size());
    return argmax_index(q_values);
}

struct TrainingConfig {
    int episodes = 3000;
    int steps_per_episode = 20;
    double epsilon_start = 1.0;
    double epsilon_decay = 0.995;  // multiplicative, applied after each episode
    double epsilon_floor = 0.01;
    std::size_t batch_size = 32;
    int target_sync_period = 100;  // gradient steps between target refreshes
    // Block fading resamples the channel independently every step, so the
    // action barely influences future state; a low discount keeps bootstrap
    // targets near the reward scale, which the 625-action joint space needs
    // to stay stable.
    double discount = 0.25;
    std::size_t replay_capacity = 50000;
    double learning_rate = 1e-3;
    double grad_clip = 0.0;  // L2 max-norm; <= 0 leaves gradients untouched
    RewardMode reward_mode = RewardMode::masked_sum;
    LossMode loss_mode = LossMode::sum;

    void validate() const {
        if (episodes < 1 || steps_per_episode < 1)
            throw std::invalid_argument("TrainingConfig: episodes and steps must be >= 1");
        if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0) ||
            !(epsilon_floor >= 0.0 && epsilon_floor <= 1.0) ||
            !(epsilon_decay > 0.0 && epsilon_decay <= 1.0))
            throw std::invalid_argument("TrainingConfig: epsilon schedule outside [0,1]");
        if (!(discount > 0.0 && discount <= 1.0))
            throw std::invalid_argument("TrainingConfig: discount outside (0,1]");
        if (batch_size < 1 || replay_capacity < batch_size)
            throw std::invalid_argument("TrainingConfig: replay must hold at least one batch");
        if (target_sync_period < 1)
            throw std::invalid_argument("TrainingConfig: target_sync_period must be >= 1");
        if (!(learning_rate > 0.0) && learning_rate != 0.0)
            throw std::invalid_argument("TrainingConfig: learning rate must be >= 0");
    }
};

// Block fading: a fresh i.i.d. channel every step; the terminal flag is
// purely the fixed horizon running out.
struct EnvStep {
    double reward = 0.0;
    ChannelRealization next_channel;
    std::vector<double> next_state;
    bool terminal = false;
};

inline EnvStep env_step(const ChannelRealization& channel, std::size_t action,
                        const SystemConfig& cfg, Rng& rng, int step_index, int steps_per_episode,
                        RewardMode mode = RewardMode::masked_sum) {
    const PowerAllocation powers = decode_action(action, cfg);
    EnvStep out;
    out.reward = compute_reward(channel, powers, cfg, mode);
    out.next_channel = sample_channel(cfg, rng);
    out.next_state = encode_state(out.next_channel, powers, cfg);
    out.terminal = step_index >= steps_per_episode - 1;
    return out;
}

struct EpisodeLogEntry {
    int episode = 0;
    double epsilon = 0.0;
    double mean_reward = 0.0;  // per-step average over the episode
    double mean_loss = 0.0;    // over gradient steps taken; 0 before learning starts
};

struct TrainResult {
    QNetworkParams params;
    std::vector<EpisodeLogEntry> log;
    double final_epsilon = 0.0;  // exploration level of the very last step
    std::uint64_t gradient_steps = 0;
};

// The training loop: per step act epsilon-greedily, store the transition,
// and once the replay holds a full batch take one optimizer step toward
// the frozen-target TD values, refreshing the target every
// target_sync_period gradient steps. Epsilon decays between episodes.
inline TrainResult train(const SystemConfig& cfg, const TrainingConfig& tc, Rng& rng) {
    cfg.validate();
    tc.validate();
    const std::size_t n_actions = action_count(cfg);

    TrainResult out;
    out.params = init_params(state_dim(cfg), n_actions, rng);
    QNetworkParams target = sync_target(out.params);
    RmspropState opt = make_rmsprop(out.params, tc.learning_rate);
    ReplayBuffer replay(tc.replay_capacity);

    double epsilon = tc.epsilon_start;
    for (int ep = 0; ep < tc.episodes; ++ep) {
        ChannelRealization channel = sample_channel(cfg, rng);
        PowerAllocation prev(cfg.K, cfg.p_min);
        std::vector<double> state = encode_state(channel, prev, cfg);
        double reward_sum = 0.0, loss_sum = 0.0;
        int losses = 0;
        for (int t = 0; t < tc.steps_per_episode; ++t) {
            const std::size_t action = select_action(forward(out.params, state), epsilon, rng);
            EnvStep step = env_step(channel, action, cfg, rng, t, tc.steps_per_episode,
                                    tc.reward_mode);
            reward_sum += step.reward;
            replay.push({state, action, step.reward, step.next_state, step.terminal});
            if (replay.size() >= tc.batch_size) {
                const std::vector<Transition> batch = replay.sample(tc.batch_size, rng);
                const std::vector<double> targets = td_targets(batch, target, tc.discount);
                LossGrad lg;
                try {
                    lg = loss_and_gradient(out.params, batch, targets, tc.loss_mode);
                } catch (const std::runtime_error& e) {
                    throw std::runtime_error("train: episode " + std::to_string(ep) + " step " +
                                             std::to_string(t) + ": " + e.what());
                }
                if (tc.grad_clip > 0.0) clip_gradient_norm(lg.grad, tc.grad_clip);
                rmsprop_step(out.params, opt, lg.grad);
                ++out.gradient_steps;
                loss_sum += lg.loss;
                ++losses;
                if (out.gradient_steps % static_cast<std::uint64_t>(tc.target_sync_period) == 0)
                    target = sync_target(out.params);
            }
            channel = std::move(step.next_channel);
            state = std::move(step.next_state);
        }
        out.log.push_back({ep, epsilon, reward_sum / tc.steps_per_episode,
                           losses > 0 ? loss_sum / losses : 0.0});
        out.final_epsilon = epsilon;
        epsilon = std::max(tc.epsilon_floor, epsilon * tc.epsilon_decay);
    }
    return out;
}

struct EvaluationResult {
    double mean_sum_rate = 0.0;
    double mean_min_rate = 0.0;
    double violation_frequency = 0.0;  // fraction of steps where any user fails
    double mean_reward = 0.0;
    std::size_t realizations = 0;
};

// Near-greedy rollout over fresh block-fading draws; previous powers start
// at p_min and carry across steps. Channel and policy randomness are
// separate streams so different policies can face identical channels.
inline EvaluationResult evaluate_policy(const QNetworkParams& params, const SystemConfig& cfg,
                                        std::size_t n_realizations, Rng& channel_rng,
                                        Rng& policy_rng, double epsilon,
                                        RewardMode mode = RewardMode::masked_sum) {
    EvaluationResult out;
    out.realizations = n_realizations;
    PowerAllocation prev(cfg.K, cfg.p_min);
    for (std::size_t i = 0; i < n_realizations; ++i) {
        const ChannelRealization channel = sample_channel(cfg, channel_rng);
        const std::vector<double> state = encode_state(channel, prev, cfg);
        const std::size_t action = select_action(forward(params, state), epsilon, policy_rng);
        const PowerAllocation powers = decode_action(action, cfg);
        const RateSummary rates = sum_rate(channel, powers, cfg.noise);
        out.mean_sum_rate += rates.sum;
        out.mean_min_rate += *std::min_element(rates.per_user.begin(), rates.per_user.end());
        const std::vector<bool> ok = outage_constraint_ok(cfg, powers);
        if (std::find(ok.begin(), ok.end(), false) != ok.end()) out.violation_frequency += 1.0;
        out.mean_reward += compute_reward(channel, powers, cfg, mode);
        prev = powers;
    }
    if (n_realizations > 0) {
        const double n = static_cast<double>(n_realizations);
        out.mean_sum_rate /= n;
        out.mean_min_rate /= n;
        out.violation_frequency /= n;
        out.mean_reward /= n;
    }
    return out;
}

inline EvaluationResult evaluate_policy(const QNetworkParams& params, const SystemConfig& cfg,
                                        std::size_t n_realizations, Rng& rng, double epsilon,
                                        RewardMode mode = RewardMode::masked_sum) {
    Rng channel_rng = make_rng(rng());
    Rng policy_rng = make_rng(rng());
    return evaluate_policy(params, cfg, n_realizations, channel_rng, policy_rng, epsilon, mode);
}

}  // namespace icpower
