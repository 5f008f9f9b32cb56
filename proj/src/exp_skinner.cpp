#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>

#include "mhpm/checkpoint.hpp"
#include "mhpm/envs.hpp"
#include "mhpm/errors.hpp"
#include "mhpm/experiments.hpp"
#include "mhpm/hippocampus.hpp"
#include "mhpm/modulation.hpp"
#include "mhpm/trainable_map.hpp"
#include "experiment_util.hpp"

namespace mhpm {

namespace {

// Action encoding in stored steps: one-hot over (wait, blue, red).
SignalVector encode(SkinnerAction a) { return SignalVector::one_hot(3, static_cast<std::size_t>(a)); }

// Two button values from the (constant) observation; only the pressed
// button's value is trained, toward the reward.
class ButtonValues : public ReplayLearner {
public:
    ButtonValues(double base_lr, double init_scale, Rng& rng)
        : base_lr_(base_lr), map_(TrainableMap::uniform(2, 8, 2, rng, init_scale)) {}

    void train(const Step& s, double multiplier) override {
        const std::size_t a = s.action.argmax();
        if (a == 0 || multiplier <= 0.0) return;
        const SignalVector y = map_.forward(s.observation);
        std::vector<double> target(y.values().begin(), y.values().end());
        target[a - 1] = s.reward;
        map_.update(s.observation, SignalVector(std::move(target)), base_lr_ * multiplier);
    }

    // Softmax probability of each button at temperature T.
    std::pair<double, double> probabilities(const SignalVector& obs, double T) const {
        const SignalVector y = map_.forward(obs);
        const double d = (y[1] - y[0]) / T;
        const double p_blue = 1.0 / (1.0 + std::exp(d));
        return {p_blue, 1.0 - p_blue};
    }

    const TrainableMap& map() const { return map_; }

private:
    double base_lr_;
    TrainableMap map_;
};

}  // namespace

SkinnerArm run_skinner_arm(const RunConfig& cfg, bool replay_on, MetricsLog* metrics, Checkpoint* final_state,
                           std::string* episode_csv) {
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("general", "seed"));
    const std::size_t max_trials = positive(cfg, "env", "max_trials");
    const std::size_t wait_ticks = nonnegative(cfg, "env", "wait_ticks");
    const std::size_t n_passes = nonnegative(cfg, "env", "n_passes");
    const double boost = cfg.get_real("env", "replay_boost");
    const double T = cfg.get_real("env", "temperature");
    const double criterion = cfg.get_real("env", "criterion");
    if (T <= 0.0) throw ConfigError("[env] temperature must be positive");
    if (boost <= 0.0) throw ConfigError("[env] replay_boost must be positive");

    EpisodeBufferConfig bc;
    bc.capacity = positive(cfg, "env", "capacity");
    bc.window = positive(cfg, "env", "episode_window");
    bc.salience_threshold = cfg.get_real("env", "salience_threshold");
    EpisodeBuffer buffer(bc);

    // Both arms share every stream, so they differ only by replay.
    SkinnerBoxEnv env(max_trials, derive_seed(seed, "skinner/env"));
    Rng init(derive_seed(seed, "skinner/learner"));
    ButtonValues learner(cfg.get_real("env", "skinner_lr"), cfg.get_real("graph", "init_scale"), init);
    Rng choice_rng(derive_seed(seed, "skinner/choice"));
    Rng replay_rng(derive_seed(seed, "skinner/replay"));
    Modulator mod(modulator_config(cfg));
    const std::string scope = replay_on ? "replay_on" : "replay_off";

    SkinnerArm arm;
    std::size_t rewarded = 0, correct = 0;
    std::int64_t tick = 0;
    auto live = [&](SkinnerAction a) {
        const SkinnerStep s = env.step(a);
        const Step step{s.observation, encode(a), s.reward, tick++};
        const double m = mod.step(s.reward);
        learner.train(step, m);
        buffer.observe_step(step);
        return s.reward;
    };
    while (!env.done()) {
        const auto [p_blue, p_red] = learner.probabilities(env.observation(), T);
        const SkinnerAction press = choice_rng.uniform() < p_blue ? SkinnerAction::PressBlue : SkinnerAction::PressRed;
        const double r = live(press);
        if (r > 0) ++rewarded;
        if (press == env.good_button()) ++correct;
        for (std::size_t w = 0; w < wait_ticks && !env.done(); ++w) live(SkinnerAction::Wait);
        ReplayReport rep;
        if (replay_on) rep = replay(buffer, learner, n_passes, boost, mod.config(), replay_rng);

        const auto probs = learner.probabilities(env.observation(), T);
        const double p_correct = env.good_button() == SkinnerAction::PressBlue ? probs.first : probs.second;
        if (!arm.reached && p_correct >= criterion) {
            arm.reached = true;
            arm.trials_to_criterion = rewarded;
        }
        if (metrics) {
            metrics->add(static_cast<std::uint64_t>(tick), scope, "reward", r);
            metrics->add(static_cast<std::uint64_t>(tick), scope, "p_correct", p_correct);
            metrics->add(static_cast<std::uint64_t>(tick), scope, "replayed_steps", static_cast<double>(rep.steps));
        }
    }
    if (!arm.reached) arm.trials_to_criterion = rewarded + 1;
    arm.correct_rate = static_cast<double>(correct) / static_cast<double>(env.trials());
    if (final_state) final_state->put(scope + "/values", learner.map().flatten());
    if (episode_csv) {
        std::ostringstream os;
        buffer.write_csv(os);
        *episode_csv = os.str();
    }
    return arm;
}

void run_skinner(ExperimentContext& ctx) {
    require(ctx.resume == nullptr, "skinner: --resume is supported for charlm only");
    MetricsLog on_log, off_log;
    std::string on_csv, off_csv;
    ctx.final_state.put_text("experiment", "skinner");
    const SkinnerArm on = run_skinner_arm(ctx.cfg, true, &on_log, &ctx.final_state, &on_csv);
    const SkinnerArm off = run_skinner_arm(ctx.cfg, false, &off_log, &ctx.final_state, &off_csv);
    std::merge(on_log.rows().begin(), on_log.rows().end(), off_log.rows().begin(), off_log.rows().end(),
               std::back_inserter(ctx.metrics.rows()),
               [](const MetricsRow& a, const MetricsRow& b) { return a.tick < b.tick; });
    const std::uint64_t last = ctx.metrics.rows().empty() ? 0 : ctx.metrics.rows().back().tick;
    ctx.metrics.add(last, "replay_on", "trials_to_criterion", static_cast<double>(on.trials_to_criterion));
    ctx.metrics.add(last, "replay_off", "trials_to_criterion", static_cast<double>(off.trials_to_criterion));
    ctx.files.emplace_back("episodes_replay_on.csv", on_csv);
    ctx.files.emplace_back("episodes_replay_off.csv", off_csv);
    ctx.summary = "skinner: rewarded trials to criterion with replay " + std::to_string(on.trials_to_criterion) +
                  (on.reached ? "" : " (not reached)") + ", without replay " + std::to_string(off.trials_to_criterion) +
                  (off.reached ? "" : " (not reached)");
}

}  // namespace mhpm
