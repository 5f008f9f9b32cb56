#pragma once

// Salience-gated episode buffer and offline replay.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <ostream>
#include <vector>

#include "mhpm/modulation.hpp"
#include "mhpm/rng.hpp"
#include "mhpm/signal.hpp"

namespace mhpm {

struct Step {
    SignalVector observation;
    SignalVector action;
    double reward = 0.0;
    std::int64_t tick = 0;

    friend bool operator==(const Step&, const Step&) = default;
};

using Episode = std::vector<Step>;

struct EpisodeBufferConfig {
    std::size_t capacity = 32;
    std::size_t window = 8;  // W
    double salience_threshold = 0.5;
};

// A step with |reward| >= threshold freezes the previous W steps, itself and
// the next W-1 steps into one episode. Episodes are evicted oldest first.
class EpisodeBuffer {
public:
    explicit EpisodeBuffer(const EpisodeBufferConfig& cfg = {});

    void observe_step(const Step& s);
    // Store snapshots still waiting for their trailing steps, as they are.
    void flush();

    const EpisodeBufferConfig& config() const { return cfg_; }
    const std::deque<Episode>& episodes() const { return episodes_; }
    std::size_t size() const { return episodes_.size(); }
    std::size_t pending() const { return pending_.size(); }

    // CSV: episode,first_tick,last_tick,steps,reward_sum,max_abs_reward
    void write_csv(std::ostream& os) const;

private:
    struct Pending {
        Episode steps;
        std::size_t remaining;
    };
    void store(Episode e);

    EpisodeBufferConfig cfg_;
    std::deque<Step> rolling_;  // last W steps before the current one
    std::vector<Pending> pending_;
    std::deque<Episode> episodes_;
    bool any_ = false;
    std::int64_t last_tick_ = 0;
};

// Anything trainable from (observation, action, reward) with a rate
// multiplier; the learner applies its own base rate.
class ReplayLearner {
public:
    virtual ~ReplayLearner() = default;
    virtual void train(const Step& step, double rate_multiplier) = 0;
};

struct ReplayReport {
    std::size_t episodes = 0;
    std::size_t steps = 0;
};

// Each pass draws size() episodes uniformly with replacement and presents
// every step with multiplier modulation_factor({reward}) * replay_boost.
ReplayReport replay(const EpisodeBuffer& buffer, ReplayLearner& learner, std::size_t n_passes, double replay_boost,
                    const ModulatorConfig& mod, Rng& rng);

}  // namespace mhpm
