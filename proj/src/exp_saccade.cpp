#include <algorithm>
#include <cmath>
#include <iterator>

#include "mhpm/envs.hpp"
#include "mhpm/errors.hpp"
#include "mhpm/experiments.hpp"
#include "mhpm/heterarchy.hpp"
#include "mhpm/modulation.hpp"
#include "mhpm/policy.hpp"
#include "experiment_util.hpp"

namespace mhpm {

namespace {

SaccadeConfig world_config(const RunConfig& cfg) {
    SaccadeConfig s;
    s.mode = TaskMode::Pro;
    s.episode_ticks = 0;
    s.r_fov = cfg.get_real("env", "r_fov");
    s.speed = cfg.get_real("env", "speed");
    s.noise = cfg.get_real("env", "noise");
    s.max_step = cfg.get_real("env", "max_step");
    return s;
}

SignalVector scaled_offset(const SaccadeObservation& o, double max_step) {
    return SignalVector{std::clamp(o.retinal_offset[0] / max_step, -1.0, 1.0),
                        std::clamp(o.retinal_offset[1] / max_step, -1.0, 1.0)};
}

double half_mean(const std::vector<double>& v, bool second) {
    const std::size_t h = v.size() / 2;
    return second ? mean(v.data() + h, v.data() + v.size()) : mean(v.data(), v.data() + h);
}

}  // namespace

BabbleResult run_babbling(const RunConfig& cfg, bool feedback, MetricsLog* metrics, const std::string& scope,
                          Checkpoint* final_state) {
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("general", "seed"));
    const std::size_t ticks = positive(cfg, "env", "babble_ticks");
    const std::uint64_t log_every = log_cadence("saccade", cfg);
    const SaccadeConfig wc = world_config(cfg);
    SaccadeEnv env(wc, derive_seed(seed, "babble/env"));
    Rng motor(derive_seed(seed, "babble/motor"));

    NodeConfig leaf;
    leaf.input_dim = 2;
    leaf.summary_dim = 2;
    leaf.k = positive(cfg, "env", "sensor_k");
    leaf.window = nonnegative(cfg, "graph", "window");
    leaf.ar_hidden = leaf.ae_hidden = nonnegative(cfg, "graph", "hidden");
    leaf.base_lr = cfg.get_real("graph", "base_lr");
    leaf.init_scale = cfg.get_real("graph", "init_scale");
    leaf.ae_identity_init = leaf.k == 1;

    HeterarchyGraph g(derive_seed(seed, "babble/graph"));
    NodeConfig vis = leaf, mot = leaf;
    vis.name = "visual";
    mot.name = "motor";
    const NodeId v = g.add_leaf(vis, "visual");
    const NodeId mo = g.add_leaf(mot, "motor");
    MergeConfig mc;
    mc.node = leaf;
    mc.node.name = "merge";
    mc.node.input_dim = mc.node.summary_dim = positive(cfg, "env", "merge_dim");
    mc.node.k = positive(cfg, "env", "merge_k");
    mc.node.ae_identity_init = false;
    mc.merge_identity_init = mc.node.input_dim == 2 * leaf.summary_dim;
    const NodeId children[] = {v, mo};
    const NodeId merge = g.connect_merge(children, mc);
    g.set_feedback_enabled(feedback);

    std::vector<double> vis_loss;
    vis_loss.reserve(ticks);
    double win_vis = 0, win_merge = 0, n_merge = 0, n_vis = 0;
    std::map<std::string, SignalVector> inputs;
    for (std::size_t t = 0; t < ticks; ++t) {
        std::vector<double> a(2);
        for (double& x : a) x = motor.uniform(-wc.max_step, wc.max_step);
        const SignalVector act(a);
        inputs["visual"] = env.observation().retinal_offset;
        inputs["motor"] = act;
        const TickReport rep = g.step(inputs, 1.0);
        env.step(act);

        const double lv = rep.nodes[v.value].ar_loss;
        vis_loss.push_back(lv);
        win_vis += lv;
        n_vis += 1;
        if (rep.nodes[merge.value].fired) {
            win_merge += rep.nodes[merge.value].ar_loss;
            n_merge += 1;
        }
        if (metrics && ((t + 1) % log_every == 0 || t + 1 == ticks)) {
            metrics->add(t + 1, scope + "/visual", "ar_loss", win_vis / n_vis);
            if (n_merge > 0) metrics->add(t + 1, scope + "/merge", "ar_loss", win_merge / n_merge);
            win_vis = win_merge = n_vis = n_merge = 0;
        }
    }
    if (final_state) g.save(*final_state, scope + "/graph/");
    return {half_mean(vis_loss, true), half_mean(vis_loss, false)};
}

TrackingResult run_tracking(const RunConfig& cfg, MetricsLog* metrics, Checkpoint* final_state) {
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("general", "seed"));
    const std::uint64_t ticks = effective_ticks("saccade", cfg);
    const std::uint64_t log_every = log_cadence("saccade", cfg);
    const std::uint64_t offset = metrics ? positive(cfg, "env", "babble_ticks") : 0;
    const SaccadeConfig wc = world_config(cfg);
    SaccadeEnv env(wc, derive_seed(seed, "track/env"));

    PolicyConfig pc;
    pc.obs_dim = 2;
    pc.act_dim = 2;
    pc.hidden = positive(cfg, "env", "policy_hidden");
    pc.base_lr = cfg.get_real("env", "policy_lr");
    pc.explore_sd = cfg.get_real("env", "explore_sd");
    pc.max_step = wc.max_step;
    pc.init_scale = cfg.get_real("graph", "init_scale");
    pc.delay = nonnegative(cfg, "env", "delay");
    pc.target = PolicyTarget::ExecutedAction;
    Rng init(derive_seed(seed, "track/policy"));
    ModulatedPolicy policy(pc, init);
    Rng explore(derive_seed(seed, "track/explore"));
    Modulator mod(modulator_config(cfg));

    std::vector<double> errs;
    errs.reserve(ticks);
    double w_err = 0, w_rew = 0, w_n = 0;
    for (std::uint64_t t = 0; t < ticks; ++t) {
        const SignalVector f = scaled_offset(env.observation(), wc.max_step);
        const SignalVector a = policy.explore(policy.propose(f), explore);
        const auto g0 = env.gaze();
        policy.record(f, a, SignalVector{g0[0], g0[1]});
        const SaccadeStep s = env.step(a);
        const double m = mod.step(s.reward);
        policy.learn(m, s.reward);
        const auto tg = env.target(), gz = env.gaze();
        const double err = (tg[0] - gz[0]) * (tg[0] - gz[0]) + (tg[1] - gz[1]) * (tg[1] - gz[1]);
        errs.push_back(err);
        w_err += err;
        w_rew += s.reward;
        w_n += 1;
        if (metrics && ((t + 1) % log_every == 0 || t + 1 == ticks)) {
            metrics->add(offset + t + 1, "track", "sq_error", w_err / w_n);
            metrics->add(offset + t + 1, "track", "reward", w_rew / w_n);
            metrics->add(offset + t + 1, "track", "m", m);
            w_err = w_rew = w_n = 0;
        }
    }
    if (final_state) policy.save(*final_state, "track/policy/");
    const std::size_t n = std::max<std::size_t>(1, errs.size() / 10);
    return {mean(errs.data(), errs.data() + n), mean(errs.data() + errs.size() - n, errs.data() + errs.size())};
}

void run_saccade(ExperimentContext& ctx) {
    require(ctx.resume == nullptr, "saccade: --resume is supported for charlm only");
    ctx.final_state.put_text("experiment", "saccade");
    MetricsLog with_fb, without_fb;
    const BabbleResult fb = run_babbling(ctx.cfg, true, &with_fb, "feedback", &ctx.final_state);
    const BabbleResult ab = run_babbling(ctx.cfg, false, &without_fb, "ablated", nullptr);
    // Both arms share the babbling clock; interleave them tick by tick.
    std::merge(with_fb.rows().begin(), with_fb.rows().end(), without_fb.rows().begin(), without_fb.rows().end(),
               std::back_inserter(ctx.metrics.rows()),
               [](const MetricsRow& a, const MetricsRow& b) { return a.tick < b.tick; });
    const TrackingResult tr = run_tracking(ctx.cfg, &ctx.metrics, &ctx.final_state);
    // Summary rows carry the last tick so the file stays tick-ordered.
    const std::uint64_t last = ctx.metrics.rows().empty() ? 0 : ctx.metrics.rows().back().tick;
    ctx.metrics.add(last, "feedback/visual", "late_ar_loss", fb.visual_loss_late);
    ctx.metrics.add(last, "ablated/visual", "late_ar_loss", ab.visual_loss_late);
    ctx.metrics.add(last, "track", "sq_error_first10", tr.err_first);
    ctx.metrics.add(last, "track", "sq_error_last10", tr.err_last);
    ctx.summary = "saccade: visual AR loss (second half) with feedback " + format_real(fb.visual_loss_late) +
                  ", ablated " + format_real(ab.visual_loss_late) + "; tracking error first 10% " +
                  format_real(tr.err_first) + ", last 10% " + format_real(tr.err_last);
}

}  // namespace mhpm
