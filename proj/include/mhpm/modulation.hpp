#pragma once

// Reward system: a decaying reward trace mapped to one global learning-rate
// multiplier, plus a weak intrinsic reward from prediction-error improvement.

namespace mhpm {

struct ModulatorConfig {
    double alpha = 1.0;           // trace -> multiplier gain
    double tau = 25.0;            // decay constant in ticks (10 ticks per simulated second)
    double m_min = 0.0;
    double m_max = 5.0;
    double intrinsic_gain = 0.1;
    double err_smooth = 0.05;     // EMA factor of the error baseline, in (0, 1]

    // Throws ContractError unless 0 <= m_min < 1 < m_max, tau > 0, ...
    void validate() const;
};

struct RewardTrace {
    double value = 0.0;
};

struct ErrorBaseline {
    double smoothed_err = 0.0;
};

// value <- value * exp(-1/tau) + reward
RewardTrace trace_step(RewardTrace trace, double reward, const ModulatorConfig& cfg);

// clamp(1 + alpha * value, m_min, m_max)
double modulation_factor(const RewardTrace& trace, const ModulatorConfig& cfg);

struct IntrinsicReward {
    double reward = 0.0;
    ErrorBaseline baseline;
};

// r = intrinsic_gain * (smoothed - current); the baseline then moves toward
// current by err_smooth.
IntrinsicReward intrinsic_reward(ErrorBaseline baseline, double current_err, const ModulatorConfig& cfg);

// Convenience owner of the trace and baseline for one experiment loop.
// Extrinsic and intrinsic rewards are summed into the single trace.
class Modulator {
public:
    explicit Modulator(ModulatorConfig cfg = {});

    const ModulatorConfig& config() const { return cfg_; }
    const RewardTrace& trace() const { return trace_; }
    const ErrorBaseline& baseline() const { return baseline_; }

    // Advance one tick with the total reward; returns the new factor.
    double step(double reward);
    // Intrinsic reward for the current top-layer error (updates the baseline).
    double intrinsic(double current_err);
    double factor() const { return modulation_factor(trace_, cfg_); }

    void restore(RewardTrace t, ErrorBaseline b) {
        trace_ = t;
        baseline_ = b;
    }

private:
    ModulatorConfig cfg_;
    RewardTrace trace_;
    ErrorBaseline baseline_;
};

}  // namespace mhpm
