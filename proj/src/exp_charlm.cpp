#include <cmath>

#include "mhpm/envs.hpp"
#include "mhpm/errors.hpp"
#include "mhpm/experiments.hpp"
#include "mhpm/heterarchy.hpp"
#include "mhpm/locality.hpp"
#include "mhpm/modulation.hpp"
#include "mhpm/rng.hpp"
#include "experiment_util.hpp"

namespace mhpm {

namespace {

// Per-layer sums since the last logged point.
struct Accum {
    double ar_loss = 0, ar_rank = 0, ae_loss = 0, ae_rank = 0, argmax = 0;
    double n_ar = 0, n_ar_rank = 0, n_ae = 0, n_ae_rank = 0;

    std::vector<double> flat() const { return {ar_loss, ar_rank, ae_loss, ae_rank, argmax, n_ar, n_ar_rank, n_ae, n_ae_rank}; }
    void restore(const std::vector<double>& f) {
        require(f.size() == 9, "charlm checkpoint: malformed accumulator");
        ar_loss = f[0], ar_rank = f[1], ae_loss = f[2], ae_rank = f[3], argmax = f[4];
        n_ar = f[5], n_ar_rank = f[6], n_ae = f[7], n_ae_rank = f[8];
    }
};

void save_pool(Checkpoint& ckpt, const std::string& name, const DistractorPool& pool) {
    std::vector<double> flat;
    for (const auto& v : pool.items()) flat.insert(flat.end(), v.values().begin(), v.values().end());
    ckpt.put(name, std::move(flat));
}

void load_pool(const Checkpoint& ckpt, const std::string& name, DistractorPool& pool, std::size_t dim) {
    const auto& flat = ckpt.get(name);
    require(flat.size() % dim == 0, "charlm checkpoint: malformed distractor pool");
    pool.clear();
    for (std::size_t i = 0; i < flat.size(); i += dim)
        pool.push(SignalVector(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(i),
                                                   flat.begin() + static_cast<std::ptrdiff_t>(i + dim))));
}

}  // namespace

CharLmResult run_charlm(ExperimentContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("general", "seed"));
    const std::uint64_t total = effective_ticks("charlm", cfg);
    const std::uint64_t log_every = log_cadence("charlm", cfg);

    const std::string& path = cfg.get_string("env", "corpus_path");
    CharStreamEnv env(path.empty() ? synthetic_corpus(positive(cfg, "env", "corpus_size"), seed) : load_corpus(path));

    ChainConfig cc;
    cc.layers = positive(cfg, "graph", "L");
    cc.k = positive(cfg, "graph", "k");
    const auto dims = cfg.get_int_list("graph", "dims");
    if (dims.size() != cc.layers)
        throw ConfigError("[graph] dims lists " + std::to_string(dims.size()) + " widths but L = " +
                          std::to_string(cc.layers));
    std::size_t in = env.dim();
    for (auto d : dims) {
        if (d <= 0) throw ConfigError("[graph] dims entries must be positive");
        cc.dims.push_back({in, static_cast<std::size_t>(d)});
        in = static_cast<std::size_t>(d);
    }
    cc.window = nonnegative(cfg, "graph", "window");
    cc.hidden = nonnegative(cfg, "graph", "hidden");
    cc.base_lr = cfg.get_real("graph", "base_lr");
    cc.init_scale = cfg.get_real("graph", "init_scale");
    HeterarchyGraph g = build_chain(cc, derive_seed(seed, "graph"));
    g.set_feedback_enabled(cfg.get_bool("graph", "feedback"));

    Modulator mod(modulator_config(cfg));
    const std::size_t n_distractors = positive(cfg, "env", "distractors");
    const std::size_t history = positive(cfg, "env", "history");

    const std::size_t L = cc.layers;
    std::vector<DistractorPool> pools(L, DistractorPool(history));
    std::vector<Rng> metric_rng;
    std::vector<Accum> acc(L);
    for (std::size_t l = 0; l < L; ++l) metric_rng.emplace_back(derive_seed(seed, "metrics/L" + std::to_string(l + 1)));

    if (ctx.resume) {
        const Checkpoint& ck = *ctx.resume;
        require(ck.get_text("experiment") == "charlm", "resume: checkpoint is not from a charlm run");
        g.load(ck, "graph/");
        env.set_cursor(static_cast<std::size_t>(ck.get("env/cursor").at(0)));
        const auto& m = ck.get("modulator");
        mod.restore(RewardTrace{m.at(0)}, ErrorBaseline{m.at(1)});
        for (std::size_t l = 0; l < L; ++l) {
            const std::string p = "metrics/L" + std::to_string(l + 1) + "/";
            metric_rng[l].load_state(ck.get_text(p + "rng"));
            load_pool(ck, p + "pool", pools[l], cc.dims[l].input_dim);
            acc[l].restore(ck.get(p + "accum"));
        }
    }
    require(g.tick() <= total, "resume: checkpoint tick " + std::to_string(g.tick()) + " beyond requested ticks");

    const bool audit = cfg.get_bool("general", "audit_locality");
    if (audit) {
        locality::reset_counters();
        locality::set_enabled(true);
    }

    std::vector<NodeId> ids;
    for (std::size_t l = 0; l < L; ++l) ids.push_back(*g.find("L" + std::to_string(l + 1)));

    std::map<std::string, SignalVector> inputs;
    while (g.tick() < total) {
        const auto sample = env.next();
        inputs["input"] = sample.one_hot;
        const double m = mod.factor();
        const TickReport rep = g.step(inputs, m);

        double reward = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            const NodeRecord& r = rep.nodes[ids[l].value];
            Accum& a = acc[l];
            if (r.fired) {
                a.ar_loss += r.ar_loss;
                a.n_ar += 1;
                const auto d = pools[l].sample(r.input, n_distractors, metric_rng[l]);
                if (!d.empty()) {
                    a.ar_rank += rank_accuracy(r.prediction, r.input, d);
                    a.n_ar_rank += 1;
                }
                if (l == 0) a.argmax += r.prediction.argmax() == r.input.argmax() ? 1.0 : 0.0;
                pools[l].push(r.input);
                if (l + 1 == L) reward += mod.intrinsic(r.ar_loss);
            }
            if (r.emitted) {
                a.ae_loss += r.ae_loss;
                a.n_ae += 1;
                for (std::size_t i = 0; i < r.ae_inputs.size(); ++i) {
                    const auto d = pools[l].sample(r.ae_inputs[i], n_distractors, metric_rng[l]);
                    if (d.empty()) continue;
                    a.ae_rank += rank_accuracy(r.reconstruction[i], r.ae_inputs[i], d);
                    a.n_ae_rank += 1;
                }
            }
        }
        mod.step(reward);

        const std::uint64_t t = g.tick();
        if (t % log_every == 0 || t == total) {
            for (std::size_t l = 0; l < L; ++l) {
                const std::string scope = "L" + std::to_string(l + 1);
                Accum& a = acc[l];
                const CorticalNode& n = g.node(ids[l]);
                ctx.metrics.add(t, scope, "fire_count", static_cast<double>(n.fire_count));
                ctx.metrics.add(t, scope, "emit_count", static_cast<double>(n.emit_count));
                if (a.n_ar > 0) ctx.metrics.add(t, scope, "ar_loss", a.ar_loss / a.n_ar);
                if (a.n_ar_rank > 0) ctx.metrics.add(t, scope, "ar_rank_acc", a.ar_rank / a.n_ar_rank);
                if (l == 0 && a.n_ar > 0) ctx.metrics.add(t, scope, "argmax_acc", a.argmax / a.n_ar);
                if (a.n_ae > 0) ctx.metrics.add(t, scope, "ae_loss", a.ae_loss / a.n_ae);
                if (a.n_ae_rank > 0) ctx.metrics.add(t, scope, "ae_rank_acc", a.ae_rank / a.n_ae_rank);
                a = Accum{};
            }
            ctx.metrics.add(t, "modulator", "m", mod.factor());
            ctx.metrics.add(t, "modulator", "trace", mod.trace().value);
        }
    }

    CharLmResult res;
    for (NodeId id : ids) res.fire_counts.push_back(g.node(id).fire_count);
    res.unigram_baseline = env.unigram_mode().second;
    if (audit) {
        res.locality_violations = locality::violations();
        res.locality_checks = locality::checks();
        locality::set_enabled(false);
        ctx.metrics.add(g.tick(), "audit", "locality_violations", static_cast<double>(res.locality_violations));
        ctx.metrics.add(g.tick(), "audit", "locality_checks", static_cast<double>(res.locality_checks));
    }
    ctx.metrics.add(g.tick(), "env", "unigram_baseline", res.unigram_baseline);

    Checkpoint& ck = ctx.final_state;
    ck.put_text("experiment", "charlm");
    g.save(ck, "graph/");
    ck.put("env/cursor", {static_cast<double>(env.cursor())});
    ck.put("modulator", {mod.trace().value, mod.baseline().smoothed_err});
    for (std::size_t l = 0; l < L; ++l) {
        const std::string p = "metrics/L" + std::to_string(l + 1) + "/";
        ck.put_text(p + "rng", metric_rng[l].save_state());
        save_pool(ck, p + "pool", pools[l]);
        ck.put(p + "accum", acc[l].flat());
    }

    ctx.summary = "charlm: " + std::to_string(g.tick()) + " ticks, fire counts";
    for (auto c : res.fire_counts) ctx.summary += " " + std::to_string(c);
    return res;
}

}  // namespace mhpm
