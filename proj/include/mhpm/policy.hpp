#pragma once

// Small learned action proposer trained with the modulated learning rate.
//
// Each tick the caller records (features, executed action, position). The
// record is applied `delay` ticks later, once the reward that followed it has
// reached the modulator, with step size base_lr * m at application time.
//
// Two training targets:
//   ExecutedAction   regress toward the action that was executed (reward
//                    enters only through m)
//   RewardedLocation on rewarded ticks only, regress toward the displacement
//                    from the recorded position to the rewarded location,
//                    clamped to max_step

#include <cstddef>
#include <deque>
#include <optional>
#include <string>

#include "mhpm/rng.hpp"
#include "mhpm/signal.hpp"
#include "mhpm/trainable_map.hpp"

namespace mhpm {

class Checkpoint;

enum class PolicyTarget { ExecutedAction, RewardedLocation };

struct PolicyConfig {
    std::size_t obs_dim = 2;
    std::size_t act_dim = 2;
    std::size_t hidden = 8;
    double base_lr = 0.05;
    double explore_sd = 0.05;
    double max_step = 0.1;
    double init_scale = 0.1;
    std::size_t delay = 5;
    PolicyTarget target = PolicyTarget::ExecutedAction;
};

class ModulatedPolicy {
public:
    ModulatedPolicy(const PolicyConfig& cfg, Rng& init_rng);

    const PolicyConfig& config() const { return cfg_; }

    // clamp(map(features), +-max_step); pure.
    SignalVector propose(const SignalVector& features) const;
    // clamp(proposal + N(0, explore_sd)), per component.
    SignalVector explore(const SignalVector& proposal, Rng& rng) const;

    // `trainable` false keeps the slot (so delays stay aligned) but the
    // ExecutedAction rule skips it.
    void record(const SignalVector& features, const SignalVector& action, const SignalVector& position,
                bool trainable = true);

    // Apply the record that is now `delay` ticks old, if any. `goal` is the
    // rewarded location (RewardedLocation only). Returns the pre-update loss
    // when an update happened.
    std::optional<double> learn(double m, double reward, const std::optional<SignalVector>& goal = std::nullopt);

    // Drop pending records (episode boundary).
    void clear_pending() { pending_.clear(); }
    std::size_t pending() const { return pending_.size(); }

    const TrainableMap& map() const { return map_; }
    TrainableMap& map() { return map_; }

    void save(Checkpoint& ckpt, const std::string& prefix) const;
    void load(const Checkpoint& ckpt, const std::string& prefix);

private:
    struct Record {
        SignalVector features, action, position;
        bool trainable;
    };

    SignalVector clamp_step(std::span<const double> v) const;

    PolicyConfig cfg_;
    TrainableMap map_;
    std::deque<Record> pending_;
};

}  // namespace mhpm
