#include <algorithm>
#include <cmath>
#include <sstream>

#include "mhpm/envs.hpp"
#include "mhpm/errors.hpp"
#include "mhpm/experiments.hpp"
#include "mhpm/instincts.hpp"
#include "mhpm/modulation.hpp"
#include "mhpm/policy.hpp"
#include "experiment_util.hpp"

namespace mhpm {

namespace {

constexpr std::size_t kFeatures = 7;

SignalVector features(const SaccadeObservation& o, double max_step) {
    auto s = [&](double x) { return std::clamp(x / max_step, -1.0, 1.0); };
    return SignalVector{s(o.retinal_offset[0]),
                        s(o.retinal_offset[1]),
                        o.salient_motion ? 1.0 : 0.0,
                        s(o.fixation_pos[0]),
                        s(o.fixation_pos[1]),
                        o.fixation_on ? 1.0 : 0.0,
                        o.fixation_color == FixationColor::Green ? 1.0 : 0.0};
}

std::vector<TaskMode> modes_of(const RunConfig& cfg, const char* key) {
    std::vector<TaskMode> out;
    for (const auto& s : cfg.get_list("env", key)) {
        const auto m = parse_task_mode(s);
        if (!m) throw ConfigError("[env] " + std::string(key) + ": unknown task mode '" + s + "'");
        out.push_back(*m);
    }
    if (out.empty()) throw ConfigError("[env] " + std::string(key) + " must name at least one mode");
    return out;
}

struct EpisodeStats {
    double reward = 0, hold = 0, learned = 0;
};

struct Agent {
    const ReflexPolicy& reflex;
    ModulatedPolicy& policy;
    Arbitrator& arb;
    Modulator* mod;  // null when not training
    double arb_lr;
    Rng& rng;
};

// One episode; trains when agent.mod is set.
EpisodeStats episode(SaccadeEnv& env, TaskMode mode, Agent& ag) {
    env.set_mode(mode);
    SaccadeObservation obs = env.reset();
    const SaccadeConfig& wc = env.config();
    const bool train = ag.mod != nullptr;
    EpisodeStats st;
    std::size_t t = 0;
    for (bool done = false; !done; ++t) {
        const SignalVector f = features(obs, wc.max_step);
        const SignalVector rx = ag.reflex.act(obs);
        SignalVector lp = ag.policy.propose(f);
        if (train) lp = ag.policy.explore(lp, ag.rng);
        const ContextKey key = context_of(obs);
        const auto [action, choice] = ag.arb.arbitrate(rx, lp, key, ag.rng);
        const bool fix_on = env.fixation_on(t), visible = env.target_visible(t);
        if (train) {
            const auto g0 = env.gaze();
            ag.policy.record(f, action, SignalVector{g0[0], g0[1]});
        }
        const SaccadeStep s = env.step(action);
        done = s.done;
        obs = s.observation;
        const auto gz = env.gaze();
        st.reward += s.reward;
        st.hold += distance(env.fixation(), gz) <= wc.r_fov ? 1.0 : 0.0;
        st.learned += choice == Choice::Learned ? 1.0 : 0.0;
        if (!train) continue;

        const double m = ag.mod->step(s.reward);
        if (s.reward != 0.0 && m > 0.0) ag.arb.update(key, choice, s.reward, ag.arb_lr * m);
        // Rewarded location in hindsight: the nearest visible stimulus inside
        // the fovea, else the gaze point itself.
        std::array<double, 2> goal = gz;
        double best = wc.r_fov;
        bool found = false;
        auto consider = [&](const std::array<double, 2>& p) {
            const double d = distance(p, gz);
            if (d <= best && (!found || d < best)) {
                goal = p;
                best = d;
                found = true;
            }
        };
        if (fix_on) consider(env.fixation());
        if (visible) consider(env.target());
        ag.policy.learn(m, s.reward, SignalVector{goal[0], goal[1]});
    }
    if (train) ag.policy.clear_pending();
    const double n = static_cast<double>(t);
    return {st.reward / n, st.hold / n, st.learned / n};
}

// Drives two copies of the world, one by the arbitrated policy and one by the
// reflex alone; true when every action matches bit for bit.
bool matches_reflex(const SaccadeConfig& wc, std::uint64_t seed, TaskMode mode, const ReflexPolicy& reflex,
                    const ModulatedPolicy& policy, const Arbitrator& arb) {
    SaccadeEnv a(wc, seed), b(wc, seed);
    a.set_mode(mode);
    b.set_mode(mode);
    SaccadeObservation oa = a.reset(), ob = b.reset();
    Rng unused(0);
    for (bool done = false; !done;) {
        const auto [act, choice] =
            arb.arbitrate(reflex.act(oa), policy.propose(features(oa, wc.max_step)), context_of(oa), unused);
        const SignalVector ref = reflex.act(ob);
        if (choice != Choice::Reflex || !(act == ref)) return false;
        const auto sa = a.step(act);
        const auto sb = b.step(ref);
        if (sa.reward != sb.reward || a.gaze() != b.gaze()) return false;
        oa = sa.observation;
        ob = sb.observation;
        done = sa.done;
    }
    return true;
}

}  // namespace

ArbitrationResult run_arbitration(ExperimentContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    require(ctx.resume == nullptr, "arbitration: --resume is supported for charlm only");
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("general", "seed"));

    SaccadeConfig wc;
    wc.r_fov = cfg.get_real("env", "r_fov");
    wc.speed = cfg.get_real("env", "speed");
    wc.noise = cfg.get_real("env", "noise");
    wc.max_step = cfg.get_real("env", "max_step");
    wc.episode_ticks = positive(cfg, "env", "episode_ticks");
    wc.fixation_ticks = nonnegative(cfg, "env", "fixation_ticks");
    wc.gap_ticks = nonnegative(cfg, "env", "gap_ticks");
    const auto train_modes = modes_of(cfg, "train_modes");
    const auto eval_modes = modes_of(cfg, "eval_modes");
    const std::size_t train_episodes = nonnegative(cfg, "env", "train_episodes");
    const std::size_t eval_episodes = positive(cfg, "env", "eval_episodes");

    const ReflexPolicy reflex(1.0, wc.max_step);
    const double gain0 = reflex.gain(), step0 = reflex.max_step();

    PolicyConfig pc;
    pc.obs_dim = kFeatures;
    pc.act_dim = 2;
    pc.hidden = positive(cfg, "env", "arb_hidden");
    pc.base_lr = cfg.get_real("env", "arb_policy_lr");
    pc.explore_sd = cfg.get_real("env", "arb_explore_sd");
    pc.max_step = wc.max_step;
    pc.init_scale = cfg.get_real("graph", "init_scale");
    pc.delay = nonnegative(cfg, "env", "arb_delay");
    pc.target = PolicyTarget::RewardedLocation;
    Rng init(derive_seed(seed, "arb/policy"));
    ModulatedPolicy policy(pc, init);
    Arbitrator arb(0.0);

    ArbitrationResult res;
    for (TaskMode m : eval_modes) {
        const bool ok = matches_reflex(wc, derive_seed(seed, std::string("arb/untrained/") + to_string(m)), m, reflex,
                                       policy, arb);
        res.untrained_matches_reflex = (m == eval_modes.front() ? true : res.untrained_matches_reflex) && ok;
    }

    arb.set_epsilon(cfg.get_real("env", "epsilon"));
    Modulator mod(modulator_config(cfg));
    Rng agent_rng(derive_seed(seed, "arb/agent"));
    SaccadeEnv train_env(wc, derive_seed(seed, "arb/env"));
    Agent trainer{reflex, policy, arb, &mod, cfg.get_real("env", "arb_lr"), agent_rng};
    std::uint64_t tick = 0;
    for (std::size_t e = 0; e < train_episodes; ++e) {
        const TaskMode m = train_modes[e % train_modes.size()];
        const EpisodeStats st = episode(train_env, m, trainer);
        tick += wc.episode_ticks;
        const std::string scope = std::string("train/") + to_string(m);
        ctx.metrics.add(tick, scope, "reward", st.reward);
        ctx.metrics.add(tick, scope, "fixation_hold", st.hold);
        ctx.metrics.add(tick, scope, "learned_frac", st.learned);
    }

    arb.set_epsilon(0.0);
    Rng eval_rng(derive_seed(seed, "arb/eval/agent"));
    Agent evaluator{reflex, policy, arb, nullptr, 0.0, eval_rng};
    for (TaskMode m : eval_modes) {
        SaccadeEnv env(wc, derive_seed(seed, std::string("arb/eval/") + to_string(m)));
        double reward = 0, hold = 0, learned = 0;
        for (std::size_t e = 0; e < eval_episodes; ++e) {
            const EpisodeStats st = episode(env, m, evaluator);
            reward += st.reward;
            hold += st.hold;
            learned += st.learned;
        }
        const double n = static_cast<double>(eval_episodes);
        const std::string scope = std::string("eval/") + to_string(m);
        ctx.metrics.add(tick, scope, "reward", reward / n);
        ctx.metrics.add(tick, scope, "fixation_hold", hold / n);
        ctx.metrics.add(tick, scope, "learned_frac", learned / n);
        res.mode_reward.emplace_back(to_string(m), reward / n);
        if (m == TaskMode::Fixation) res.fixation_hold = hold / n;
    }
    res.reflex_unchanged = reflex.gain() == gain0 && reflex.max_step() == step0;
    ctx.metrics.add(tick, "arbitrator", "untrained_matches_reflex", res.untrained_matches_reflex ? 1.0 : 0.0);

    std::ostringstream prefs;
    arb.write_csv(prefs);
    ctx.files.emplace_back("preferences.csv", prefs.str());
    ctx.final_state.put_text("experiment", "arbitration");
    arb.save(ctx.final_state, "arbitrator/");
    policy.save(ctx.final_state, "policy/");

    ctx.summary = "arbitration: held-out fixation hold " + format_real(res.fixation_hold) +
                  ", untrained arbitrator matches reflex: " + (res.untrained_matches_reflex ? "yes" : "no");
    for (const auto& [name, r] : res.mode_reward) ctx.summary += "; " + name + " reward " + format_real(r);
    return res;
}

}  // namespace mhpm
