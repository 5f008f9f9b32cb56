#include "mhpm/policy.hpp"

#include <algorithm>
#include <cmath>

#include "mhpm/checkpoint.hpp"
#include "mhpm/errors.hpp"

namespace mhpm {

ModulatedPolicy::ModulatedPolicy(const PolicyConfig& cfg, Rng& init_rng) : cfg_(cfg) {
    require(cfg.obs_dim > 0 && cfg.act_dim > 0 && cfg.hidden > 0, "ModulatedPolicy: dimensions must be positive");
    require(cfg.max_step > 0.0 && cfg.explore_sd >= 0.0 && cfg.base_lr >= 0.0,
            "ModulatedPolicy: max_step > 0, explore_sd >= 0, base_lr >= 0");
    map_ = TrainableMap::uniform(cfg.obs_dim, cfg.hidden, cfg.act_dim, init_rng, cfg.init_scale);
}

SignalVector ModulatedPolicy::clamp_step(std::span<const double> v) const {
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x = std::clamp(x, -cfg_.max_step, cfg_.max_step);
    return SignalVector(std::move(out));
}

SignalVector ModulatedPolicy::propose(const SignalVector& features) const {
    return clamp_step(map_.forward(features).values());
}

SignalVector ModulatedPolicy::explore(const SignalVector& proposal, Rng& rng) const {
    require_dim(cfg_.act_dim, proposal.dim(), "ModulatedPolicy::explore");
    std::vector<double> a(proposal.values().begin(), proposal.values().end());
    for (double& x : a) x += cfg_.explore_sd * rng.normal();
    return clamp_step(a);
}

void ModulatedPolicy::record(const SignalVector& features, const SignalVector& action, const SignalVector& position,
                             bool trainable) {
    require_dim(cfg_.obs_dim, features.dim(), "ModulatedPolicy features");
    require_dim(cfg_.act_dim, action.dim(), "ModulatedPolicy action");
    pending_.push_back({features, action, position, trainable});
}

std::optional<double> ModulatedPolicy::learn(double m, double reward, const std::optional<SignalVector>& goal) {
    require(std::isfinite(m) && m >= 0.0, "ModulatedPolicy::learn: m must be finite and nonnegative");
    if (pending_.size() <= cfg_.delay) return std::nullopt;
    const Record r = std::move(pending_.front());
    pending_.pop_front();
    SignalVector target;
    if (cfg_.target == PolicyTarget::ExecutedAction) {
        if (!r.trainable) return std::nullopt;
        target = r.action;
    } else {
        if (reward <= 0.0 || !goal) return std::nullopt;
        require_dim(r.position.dim(), goal->dim(), "ModulatedPolicy goal");
        std::vector<double> d(goal->dim());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*goal)[i] - r.position[i];
        target = clamp_step(d);
    }
    return map_.update(r.features, target, cfg_.base_lr * m);
}

void ModulatedPolicy::save(Checkpoint& ckpt, const std::string& prefix) const {
    ckpt.put(prefix + "map", map_.flatten());
}

void ModulatedPolicy::load(const Checkpoint& ckpt, const std::string& prefix) {
    map_.unflatten(ckpt.get(prefix + "map"));
    pending_.clear();
}

}  // namespace mhpm
