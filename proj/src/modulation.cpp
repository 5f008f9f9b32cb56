#include "mhpm/modulation.hpp"

#include <algorithm>
#include <cmath>

#include "mhpm/errors.hpp"

namespace mhpm {

void ModulatorConfig::validate() const {
    require(std::isfinite(alpha), "modulation: alpha must be finite");
    require(std::isfinite(tau) && tau > 0.0, "modulation: tau must be positive");
    require(m_min >= 0.0 && m_min < 1.0 && m_max > 1.0 && std::isfinite(m_max),
            "modulation: need 0 <= m_min < 1 < m_max");
    require(intrinsic_gain >= 0.0 && std::isfinite(intrinsic_gain), "modulation: intrinsic_gain must be >= 0");
    require(err_smooth > 0.0 && err_smooth <= 1.0, "modulation: err_smooth must lie in (0, 1]");
}

RewardTrace trace_step(RewardTrace trace, double reward, const ModulatorConfig& cfg) {
    require(std::isfinite(reward), "trace_step: reward must be finite");
    trace.value = trace.value * std::exp(-1.0 / cfg.tau) + reward;
    return trace;
}

double modulation_factor(const RewardTrace& trace, const ModulatorConfig& cfg) {
    return std::clamp(1.0 + cfg.alpha * trace.value, cfg.m_min, cfg.m_max);
}

IntrinsicReward intrinsic_reward(ErrorBaseline baseline, double current_err, const ModulatorConfig& cfg) {
    require(current_err >= 0.0 && std::isfinite(current_err), "intrinsic_reward: error must be finite and >= 0");
    IntrinsicReward out;
    out.reward = cfg.intrinsic_gain * (baseline.smoothed_err - current_err);
    out.baseline.smoothed_err = (1.0 - cfg.err_smooth) * baseline.smoothed_err + cfg.err_smooth * current_err;
    return out;
}

Modulator::Modulator(ModulatorConfig cfg) : cfg_(cfg) { cfg_.validate(); }

double Modulator::step(double reward) {
    trace_ = trace_step(trace_, reward, cfg_);
    return factor();
}

double Modulator::intrinsic(double current_err) {
    const IntrinsicReward r = intrinsic_reward(baseline_, current_err, cfg_);
    baseline_ = r.baseline;
    return r.reward;
}

}  // namespace mhpm
