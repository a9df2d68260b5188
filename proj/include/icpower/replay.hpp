#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "icpower/rng.hpp"

namespace icpower {

// One interaction record. action indexes the joint power choice;
// terminal marks the last step of an episode (its successor state is
// never bootstrapped from).
struct Transition {
    std::vector<double> state;
    std::size_t action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
};

// Fixed-capacity ring. Once full, each insertion evicts the oldest entry.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
        ring_.reserve(capacity);
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return ring_.size(); }

    void push(Transition t) {
        if (ring_.size() < capacity_) {
            ring_.push_back(std::move(t));
        } else {
            ring_[cursor_] = std::move(t);
        }
        cursor_ = (cursor_ + 1) % capacity_;
    }

    const Transition& at(std::size_t i) const { return ring_.at(i); }

    // Uniform sample with replacement; requires a nonempty buffer.
    std::vector<Transition> sample(std::size_t n, Rng& rng) const {
        if (ring_.empty()) throw std::logic_error("ReplayBuffer: sample from empty buffer");
        std::vector<Transition> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(ring_[uniform_index(rng, ring_.size())]);
        return out;
    }

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<Transition> ring_;
};

}  // namespace icpower
