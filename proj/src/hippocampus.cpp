#include "mhpm/hippocampus.hpp"

#include <algorithm>
#include <cmath>

#include "mhpm/errors.hpp"
#include "mhpm/metrics.hpp"

namespace mhpm {

EpisodeBuffer::EpisodeBuffer(const EpisodeBufferConfig& cfg) : cfg_(cfg) {
    require(cfg.capacity > 0 && cfg.window > 0, "EpisodeBuffer: capacity and window must be positive");
    require(cfg.salience_threshold >= 0.0, "EpisodeBuffer: salience_threshold must be nonnegative");
}

void EpisodeBuffer::store(Episode e) {
    episodes_.push_back(std::move(e));
    while (episodes_.size() > cfg_.capacity) episodes_.pop_front();
}

void EpisodeBuffer::observe_step(const Step& s) {
    require(!any_ || s.tick > last_tick_,
            "EpisodeBuffer: tick " + std::to_string(s.tick) + " not after " + std::to_string(last_tick_));
    require(std::isfinite(s.reward), "EpisodeBuffer: reward must be finite");
    any_ = true;
    last_tick_ = s.tick;

    for (auto& p : pending_) {
        p.steps.push_back(s);
        --p.remaining;
    }
    if (std::abs(s.reward) >= cfg_.salience_threshold) {
        Episode e(rolling_.begin(), rolling_.end());
        e.push_back(s);
        pending_.push_back({std::move(e), cfg_.window - 1});
    }
    for (auto it = pending_.begin(); it != pending_.end();) {
        if (it->remaining == 0) {
            store(std::move(it->steps));
            it = pending_.erase(it);
        } else {
            ++it;
        }
    }
    rolling_.push_back(s);
    if (rolling_.size() > cfg_.window) rolling_.pop_front();
}

void EpisodeBuffer::flush() {
    for (auto& p : pending_) store(std::move(p.steps));
    pending_.clear();
}

void EpisodeBuffer::write_csv(std::ostream& os) const {
    os << "episode,first_tick,last_tick,steps,reward_sum,max_abs_reward\n";
    for (std::size_t i = 0; i < episodes_.size(); ++i) {
        const auto& e = episodes_[i];
        double sum = 0.0, peak = 0.0;
        for (const auto& s : e) {
            sum += s.reward;
            peak = std::max(peak, std::abs(s.reward));
        }
        os << i << ',' << e.front().tick << ',' << e.back().tick << ',' << e.size() << ',' << format_real(sum) << ','
           << format_real(peak) << '\n';
    }
}

ReplayReport replay(const EpisodeBuffer& buffer, ReplayLearner& learner, std::size_t n_passes, double replay_boost,
                    const ModulatorConfig& mod, Rng& rng) {
    require(replay_boost > 0.0, "replay: replay_boost must be positive");
    ReplayReport rep;
    const auto& eps = buffer.episodes();
    if (eps.empty()) return rep;
    for (std::size_t pass = 0; pass < n_passes; ++pass) {
        for (std::size_t i = 0; i < eps.size(); ++i) {
            const Episode& e = eps[rng.below(eps.size())];
            for (const Step& s : e) {
                learner.train(s, modulation_factor(RewardTrace{s.reward}, mod) * replay_boost);
                ++rep.steps;
            }
            ++rep.episodes;
        }
    }
    return rep;
}

}  // namespace mhpm
