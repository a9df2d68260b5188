#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "icpower/matrix.hpp"
#include "icpower/replay.hpp"
#include "icpower/rng.hpp"

namespace icpower {

// One dense layer; W is out_dim x in_dim, applied as W*x + b.
struct Layer {
    Matrix W;
    std::vector<double> b;
};

// Dense rectifier network. layers.front() consumes the state vector,
// layers.back() emits one value per action (linear, Q-values are
// unbounded). dims records the full size chain [in, hidden..., out];
// init_seed and step_count ride along into checkpoints so a saved
// network records where it came from.
struct QNetworkParams {
    std::vector<Layer> layers;
    std::vector<std::size_t> dims;
    std::uint64_t init_seed = 0;
    std::uint64_t step_count = 0;
};

inline std::size_t argmax_index(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("argmax_index: empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;  // strict: ties keep the first index
    return best;
}

// Scaled-Gaussian weights (std sqrt(2/fan_in), rectifier-appropriate),
// zero biases. Draw order is fixed (per layer: W row-major, then b is
// untouched), so a seed pins the network bit-for-bit.
inline QNetworkParams init_params_with_dims(const std::vector<std::size_t>& dims, Rng& rng,
                                            std::uint64_t seed_label = 0) {
    if (dims.size() < 2) throw std::invalid_argument("init_params: need at least in/out dims");
    for (std::size_t d : dims)
        if (d == 0) throw std::invalid_argument("init_params: zero-sized layer");
    QNetworkParams p;
    p.dims = dims;
    p.init_seed = seed_label;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer{Matrix(dims[l + 1], dims[l]), std::vector<double>(dims[l + 1], 0.0)};
        const double scale = std::sqrt(2.0 / static_cast<double>(dims[l]));
        for (std::size_t i = 0; i < layer.W.size(); ++i) layer.W.data()[i] = scale * gauss(rng);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

inline QNetworkParams init_params(std::size_t state_dim, std::size_t action_count, Rng& rng,
                                  std::uint64_t seed_label = 0) {
    return init_params_with_dims({state_dim, 200, 100, 40, action_count}, rng, seed_label);
}

namespace detail {

// acts[0] is the input; acts[l+1] is layer l's post-activation output.
// For rectified layers the mask is recoverable from the activation sign.
struct ForwardTrace {
    std::vector<std::vector<double>> acts;
};

inline void affine(const Layer& layer, const std::vector<double>& x, std::vector<double>& out) {
    const std::size_t rows = layer.W.rows(), cols = layer.W.cols();
    out.assign(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = layer.W.data() + r * cols;
        double acc = layer.b[r];
        for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
        out[r] = acc;
    }
}

inline std::vector<double> forward_traced(const QNetworkParams& p, const std::vector<double>& state,
                                          ForwardTrace* trace) {
    if (state.size() != p.dims.front())
        throw std::invalid_argument("forward: state dimension mismatch");
    for (double x : state)
        if (!std::isfinite(x)) throw std::invalid_argument("forward: non-finite state entry");
    std::vector<double> cur = state, next;
    if (trace) {
        trace->acts.clear();
        trace->acts.push_back(cur);
    }
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        affine(p.layers[l], cur, next);
        if (l + 1 < p.layers.size())
            for (double& v : next) v = v > 0.0 ? v : 0.0;
        cur = next;
        if (trace) trace->acts.push_back(cur);
    }
    return cur;
}

}  // namespace detail

inline std::vector<double> forward(const QNetworkParams& p, const std::vector<double>& state) {
    return detail::forward_traced(p, state, nullptr);
}

// y_i = r_i + discount * max_a' Q(s'_i, a'; target), or just r_i past a
// terminal step. Targets are constants w.r.t. the training parameters.
inline std::vector<double> td_targets(const std::vector<Transition>& batch,
                                      const QNetworkParams& target, double discount) {
    if (!(discount > 0.0 && discount <= 1.0))
        throw std::invalid_argument("td_targets: discount must be in (0,1]");
    std::vector<double> y;
    y.reserve(batch.size());
    for (const Transition& t : batch) {
        if (t.terminal) {
            y.push_back(t.reward);
        } else {
            const std::vector<double> q = forward(target, t.next_state);
            double best = q[0];
            for (double v : q) best = std::max(best, v);
            y.push_back(t.reward + discount * best);
        }
    }
    return y;
}

enum class LossMode {
    sum,   // plain sum-squared error over the batch
    mean,  // divided by batch size; decouples step size from batch size
};

struct LossGrad {
    double loss = 0.0;
    std::vector<Layer> grad;  // same shapes as the network layers
};

inline std::vector<Layer> zero_like(const QNetworkParams& p) {
    std::vector<Layer> g;
    g.reserve(p.layers.size());
    for (const Layer& l : p.layers)
        g.push_back({Matrix(l.W.rows(), l.W.cols()), std::vector<double>(l.b.size(), 0.0)});
    return g;
}

// Squared TD error summed over the batch; reverse-mode gradient. Only
// the taken action's output unit carries error per transition, so the
// output layer touches a single weight row before the dense sweep down.
inline LossGrad loss_and_gradient(const QNetworkParams& p, const std::vector<Transition>& batch,
                                  const std::vector<double>& targets,
                                  LossMode mode = LossMode::sum) {
    if (batch.size() != targets.size())
        throw std::invalid_argument("loss_and_gradient: batch/target size mismatch");
    if (p.layers.empty()) throw std::invalid_argument("loss_and_gradient: empty network");
    LossGrad out;
    out.grad = zero_like(p);
    const double weight = (mode == LossMode::mean && !batch.empty())
                              ? 1.0 / static_cast<double>(batch.size())
                              : 1.0;
    const std::size_t L = p.layers.size();
    detail::ForwardTrace trace;
    std::vector<double> delta, delta_prev;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = batch[i];
        const std::vector<double> q = detail::forward_traced(p, t.state, &trace);
        if (t.action >= q.size()) throw std::invalid_argument("loss_and_gradient: action out of range");
        const double err = q[t.action] - targets[i];
        out.loss += weight * err * err;

        // Output layer: single nonzero error unit.
        const double d_out = 2.0 * weight * err;
        {
            const Layer& top = p.layers[L - 1];
            Layer& gtop = out.grad[L - 1];
            const std::vector<double>& act = trace.acts[L - 1];
            double* grow = gtop.W.data() + t.action * top.W.cols();
            for (std::size_t c = 0; c < top.W.cols(); ++c) grow[c] += d_out * act[c];
            gtop.b[t.action] += d_out;
            delta.assign(top.W.cols(), 0.0);
            const double* wrow = top.W.data() + t.action * top.W.cols();
            for (std::size_t c = 0; c < top.W.cols(); ++c) {
                const double masked = trace.acts[L - 1][c] > 0.0 ? wrow[c] * d_out : 0.0;
                delta[c] = masked;
            }
        }
        // Hidden layers, top-down. delta holds dLoss/d(pre-activation of layer l).
        for (std::size_t l = L - 1; l-- > 0;) {
            const Layer& layer = p.layers[l];
            Layer& glayer = out.grad[l];
            const std::vector<double>& act = trace.acts[l];
            const std::size_t rows = layer.W.rows(), cols = layer.W.cols();
            for (std::size_t r = 0; r < rows; ++r) {
                const double d = delta[r];
                if (d == 0.0) continue;
                double* grow = glayer.W.data() + r * cols;
                for (std::size_t c = 0; c < cols; ++c) grow[c] += d * act[c];
                glayer.b[r] += d;
            }
            if (l == 0) break;
            delta_prev.assign(cols, 0.0);
            for (std::size_t r = 0; r < rows; ++r) {
                const double d = delta[r];
                if (d == 0.0) continue;
                const double* wr = layer.W.data() + r * cols;
                for (std::size_t c = 0; c < cols; ++c) delta_prev[c] += wr[c] * d;
            }
            for (std::size_t c = 0; c < cols; ++c)
                if (!(trace.acts[l][c] > 0.0)) delta_prev[c] = 0.0;
            delta.swap(delta_prev);
        }
    }
    if (!std::isfinite(out.loss))
        throw std::runtime_error("loss_and_gradient: non-finite loss (learning diverged)");
    return out;
}

// Global L2 clip; returns the pre-clip norm. A max_norm <= 0 disables it.
inline double clip_gradient_norm(std::vector<Layer>& grad, double max_norm) {
    double sq = 0.0;
    for (const Layer& l : grad) {
        for (std::size_t i = 0; i < l.W.size(); ++i) sq += l.W.data()[i] * l.W.data()[i];
        for (double v : l.b) sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double s = max_norm / norm;
        for (Layer& l : grad) {
            for (std::size_t i = 0; i < l.W.size(); ++i) l.W.data()[i] *= s;
            for (double& v : l.b) v *= s;
        }
    }
    return norm;
}

// acc <- rho*acc + (1-rho)*g^2 ; theta <- theta - alpha*g/(sqrt(acc)+delta).
struct RmspropState {
    double alpha = 1e-3;
    double rho = 0.9;
    double delta = 1e-8;
    std::vector<Layer> acc;
};

inline RmspropState make_rmsprop(const QNetworkParams& p, double alpha = 1e-3, double rho = 0.9,
                                 double delta = 1e-8) {
    RmspropState s;
    s.alpha = alpha;
    s.rho = rho;
    s.delta = delta;
    s.acc = zero_like(p);
    return s;
}

inline void rmsprop_step(QNetworkParams& p, RmspropState& s, const std::vector<Layer>& grad) {
    if (grad.size() != p.layers.size() || s.acc.size() != p.layers.size())
        throw std::invalid_argument("rmsprop_step: shape mismatch");
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        Layer& layer = p.layers[l];
        Layer& acc = s.acc[l];
        const Layer& g = grad[l];
        if (g.W.rows() != layer.W.rows() || g.W.cols() != layer.W.cols() ||
            g.b.size() != layer.b.size())
            throw std::invalid_argument("rmsprop_step: layer shape mismatch");
        for (std::size_t i = 0; i < layer.W.size(); ++i) {
            const double gi = g.W.data()[i];
            double& a = acc.W.data()[i];
            a = s.rho * a + (1.0 - s.rho) * gi * gi;
            layer.W.data()[i] -= s.alpha * gi / (std::sqrt(a) + s.delta);
        }
        for (std::size_t i = 0; i < layer.b.size(); ++i) {
            const double gi = g.b[i];
            double& a = acc.b[i];
            a = s.rho * a + (1.0 - s.rho) * gi * gi;
            layer.b[i] -= s.alpha * gi / (std::sqrt(a) + s.delta);
        }
    }
    ++p.step_count;
}

// Value copy; later training steps cannot reach into the returned params.
inline QNetworkParams sync_target(const QNetworkParams& p) { return p; }

// Checkpoint layout (little-endian): "ICQN", u32 version, u32 dim count,
// u64 dims..., u64 init_seed, u64 step_count, then per layer the weight
// matrix row-major and the bias vector as raw doubles. Round-trips
// bit-exactly on one platform.
inline void save_checkpoint(const std::string& path, const QNetworkParams& p) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
    auto put_u32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
    auto put_u64 = [&](std::uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
    f.write("ICQN", 4);
    put_u32(1);
    put_u32(static_cast<std::uint32_t>(p.dims.size()));
    for (std::size_t d : p.dims) put_u64(d);
    put_u64(p.init_seed);
    put_u64(p.step_count);
    for (const Layer& l : p.layers) {
        f.write(reinterpret_cast<const char*>(l.W.data()),
                static_cast<std::streamsize>(l.W.size() * sizeof(double)));
        f.write(reinterpret_cast<const char*>(l.b.data()),
                static_cast<std::streamsize>(l.b.size() * sizeof(double)));
    }
    if (!f) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

inline QNetworkParams load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "ICQN", 4) != 0)
        throw std::runtime_error("load_checkpoint: bad magic in " + path);
    auto get_u32 = [&] {
        std::uint32_t v = 0;
        f.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto get_u64 = [&] {
        std::uint64_t v = 0;
        f.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    const std::uint32_t version = get_u32();
    if (version != 1) throw std::runtime_error("load_checkpoint: unsupported version");
    const std::uint32_t n_dims = get_u32();
    if (!f || n_dims < 2 || n_dims > 64) throw std::runtime_error("load_checkpoint: corrupt header");
    QNetworkParams p;
    p.dims.resize(n_dims);
    for (std::uint32_t i = 0; i < n_dims; ++i) p.dims[i] = get_u64();
    p.init_seed = get_u64();
    p.step_count = get_u64();
    for (std::size_t l = 0; l + 1 < p.dims.size(); ++l) {
        Layer layer{Matrix(p.dims[l + 1], p.dims[l]), std::vector<double>(p.dims[l + 1], 0.0)};
        f.read(reinterpret_cast<char*>(layer.W.data()),
               static_cast<std::streamsize>(layer.W.size() * sizeof(double)));
        f.read(reinterpret_cast<char*>(layer.b.data()),
               static_cast<std::streamsize>(layer.b.size() * sizeof(double)));
        p.layers.push_back(std::move(layer));
    }
    if (!f) throw std::runtime_error("load_checkpoint: truncated file " + path);
    f.peek();
    if (!f.eof()) throw std::runtime_error("load_checkpoint: trailing bytes in " + path);
    return p;
}

}  // namespace icpower
