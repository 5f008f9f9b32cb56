#pragma once

// Innate machinery: a frozen reflex policy and a reward-trained arbitrator
// choosing between the reflex and a learned proposal per discrete context.

#include <compare>
#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "mhpm/envs.hpp"
#include "mhpm/rng.hpp"
#include "mhpm/signal.hpp"

namespace mhpm {

class Checkpoint;

// Placeholder for the four behavioral modes; nothing reads it.
enum class AmygdalaMode { FightOrFlight, Busy, Focus, Boring };
inline constexpr AmygdalaMode kAmygdalaMode = AmygdalaMode::Busy;

// Pro-saccade toward a visible salient stimulus: clamp(gain * offset).
class ReflexPolicy {
public:
    explicit ReflexPolicy(double gain = 1.0, double max_step = 0.1);

    SignalVector act(const SaccadeObservation& obs) const;

    double gain() const { return gain_; }
    double max_step() const { return max_step_; }

private:
    double gain_;
    double max_step_;
};

struct ContextKey {
    FixationColor color = FixationColor::None;
    bool fixation_on = false;
    bool salient_motion = false;

    friend auto operator<=>(const ContextKey&, const ContextKey&) = default;
};

ContextKey context_of(const SaccadeObservation& obs);
std::string to_string(const ContextKey& c);

enum class Choice { Reflex = 0, Learned = 1 };

class Arbitrator {
public:
    explicit Arbitrator(double epsilon = 0.0);

    double epsilon() const { return epsilon_; }
    void set_epsilon(double e);

    // epsilon: uniform choice; otherwise argmax preference, tie -> reflex.
    // Draws from rng only when epsilon > 0.
    Choice choose(const ContextKey& c, Rng& rng) const;
    std::pair<SignalVector, Choice> arbitrate(const SignalVector& reflex, const SignalVector& learned,
                                              const ContextKey& c, Rng& rng) const;
    // preference[c][chosen] += eta_eff * reward, eta_eff > 0.
    void update(const ContextKey& c, Choice chosen, double reward, double eta_eff);

    // (reflex, learned); (0, 0) for unseen contexts.
    std::pair<double, double> preference(const ContextKey& c) const;
    const std::map<ContextKey, std::pair<double, double>>& table() const { return table_; }

    // CSV: context,pref_reflex,pref_learned
    void write_csv(std::ostream& os) const;
    void save(Checkpoint& ckpt, const std::string& prefix) const;
    void load(const Checkpoint& ckpt, const std::string& prefix);

private:
    double epsilon_;
    std::map<ContextKey, std::pair<double, double>> table_;
};

}  // namespace mhpm
