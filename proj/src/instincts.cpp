#include "mhpm/instincts.hpp"

#include <algorithm>
#include <cmath>

#include "mhpm/checkpoint.hpp"
#include "mhpm/errors.hpp"
#include "mhpm/metrics.hpp"

namespace mhpm {

ReflexPolicy::ReflexPolicy(double gain, double max_step) : gain_(gain), max_step_(max_step) {
    require(gain > 0.0 && max_step > 0.0, "ReflexPolicy: gain and max_step must be positive");
}

SignalVector ReflexPolicy::act(const SaccadeObservation& obs) const {
    if (!obs.salient_motion) return SignalVector::zeros(2);
    require_dim(2, obs.retinal_offset.dim(), "ReflexPolicy offset");
    return SignalVector{std::clamp(gain_ * obs.retinal_offset[0], -max_step_, max_step_),
                        std::clamp(gain_ * obs.retinal_offset[1], -max_step_, max_step_)};
}

ContextKey context_of(const SaccadeObservation& obs) {
    return {obs.fixation_color, obs.fixation_on, obs.salient_motion};
}

std::string to_string(const ContextKey& c) {
    return std::string(to_string(c.color)) + (c.fixation_on ? "/on" : "/off") + (c.salient_motion ? "/motion" : "/still");
}

Arbitrator::Arbitrator(double epsilon) { set_epsilon(epsilon); }

void Arbitrator::set_epsilon(double e) {
    require(e >= 0.0 && e <= 1.0, "Arbitrator: epsilon must lie in [0, 1]");
    epsilon_ = e;
}

Choice Arbitrator::choose(const ContextKey& c, Rng& rng) const {
    if (epsilon_ > 0.0 && rng.uniform() < epsilon_) return rng.bernoulli(0.5) ? Choice::Learned : Choice::Reflex;
    const auto [reflex, learned] = preference(c);
    return learned > reflex ? Choice::Learned : Choice::Reflex;
}

std::pair<SignalVector, Choice> Arbitrator::arbitrate(const SignalVector& reflex, const SignalVector& learned,
                                                      const ContextKey& c, Rng& rng) const {
    const Choice ch = choose(c, rng);
    return {ch == Choice::Learned ? learned : reflex, ch};
}

void Arbitrator::update(const ContextKey& c, Choice chosen, double reward, double eta_eff) {
    require(eta_eff > 0.0 && std::isfinite(eta_eff), "Arbitrator::update: eta_eff must be positive");
    require(std::isfinite(reward), "Arbitrator::update: reward must be finite");
    auto& p = table_[c];
    (chosen == Choice::Learned ? p.second : p.first) += eta_eff * reward;
}

std::pair<double, double> Arbitrator::preference(const ContextKey& c) const {
    const auto it = table_.find(c);
    return it == table_.end() ? std::pair{0.0, 0.0} : it->second;
}

void Arbitrator::write_csv(std::ostream& os) const {
    os << "context,pref_reflex,pref_learned\n";
    for (const auto& [c, p] : table_) os << to_string(c) << ',' << format_real(p.first) << ',' << format_real(p.second) << '\n';
}

void Arbitrator::save(Checkpoint& ckpt, const std::string& prefix) const {
    std::vector<double> flat;
    for (const auto& [c, p] : table_) {
        flat.insert(flat.end(), {static_cast<double>(c.color), c.fixation_on ? 1.0 : 0.0, c.salient_motion ? 1.0 : 0.0,
                                 p.first, p.second});
    }
    ckpt.put(prefix + "table", std::move(flat));
    ckpt.put(prefix + "epsilon", {epsilon_});
}

void Arbitrator::load(const Checkpoint& ckpt, const std::string& prefix) {
    const auto& flat = ckpt.get(prefix + "table");
    require(flat.size() % 5 == 0, "Arbitrator::load: malformed table");
    table_.clear();
    for (std::size_t i = 0; i < flat.size(); i += 5) {
        const ContextKey c{static_cast<FixationColor>(static_cast<int>(flat[i])), flat[i + 1] != 0.0, flat[i + 2] != 0.0};
        table_[c] = {flat[i + 3], flat[i + 4]};
    }
    set_epsilon(ckpt.get(prefix + "epsilon").at(0));
}

}  // namespace mhpm
