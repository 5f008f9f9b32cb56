#include <algorithm>
#include <cmath>

#include "mhpm/errors.hpp"
#include "mhpm/experiments.hpp"
#include "mhpm/rng.hpp"
#include "mhpm/unit.hpp"
#include "experiment_util.hpp"

namespace mhpm {

namespace {

SignalVector random_vector(std::size_t dim, Rng& rng) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return SignalVector(std::move(v));
}

double norm_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

// Central differences of f around p.
template <class F>
std::vector<double> central_difference(F&& f, std::vector<double> p, double h) {
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double orig = p[i];
        p[i] = orig + h;
        const double up = f(p);
        p[i] = orig - h;
        const double down = f(p);
        p[i] = orig;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

std::vector<double> difference(const std::vector<double>& before, const std::vector<double>& after) {
    std::vector<double> d(before.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = before[i] - after[i];
    return d;
}

}  // namespace

// The analytic gradient is read off one real update with eta = 1, so the
// check covers the code path that learns, not a separate gradient routine.
GradcheckResult run_gradcheck(ExperimentContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    require(ctx.resume == nullptr, "gradcheck: --resume is supported for charlm only");
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("general", "seed"));
    const std::size_t instances = positive(cfg, "env", "instances");
    const std::size_t max_dim = positive(cfg, "env", "max_dim");
    const double h = cfg.get_real("env", "fd_step");
    if (h <= 0.0) throw ConfigError("[env] fd_step must be positive");
    Rng rng(derive_seed(seed, "gradcheck"));
    auto dim = [&] { return 1 + static_cast<std::size_t>(rng.below(max_dim)); };

    GradcheckResult res;
    res.instances = instances;
    for (std::size_t i = 0; i < instances; ++i) {
        ARConfig ac;
        ac.input_dim = dim();
        ac.context_dim = rng.below(max_dim + 1);
        ac.window = 1 + rng.below(4);
        ac.hidden = dim();
        ac.init_scale = 0.5;
        ARUnit ar(ac, rng);
        const SignalVector ctxv = random_vector(ac.context_dim, rng);
        for (std::size_t w = 0; w < ac.window; ++w) ar.observe(ctxv, random_vector(ac.input_dim, rng), 0.0);
        const SignalVector actual = random_vector(ac.input_dim, rng);
        const std::vector<double> p0 = ar.map().flatten();
        auto ar_loss = [&](const std::vector<double>& p) {
            ARUnit probe = ar;
            probe.map().unflatten(p);
            return 0.5 * probe.predict(ctxv).squared_distance(actual);
        };
        const auto fd_ar = central_difference(ar_loss, p0, h);
        ARUnit stepped = ar;
        stepped.observe(ctxv, actual, 1.0);
        const double e_ar = norm_rel_error(difference(p0, stepped.map().flatten()), fd_ar);

        AEConfig ec;
        ec.k = 1 + rng.below(4);
        ec.input_dim = dim();
        ec.summary_dim = dim();
        ec.hidden = dim();
        ec.init_scale = 0.5;
        AEUnit ae(ec, rng);
        std::vector<SignalVector> inputs;
        for (std::size_t j = 0; j < ec.k; ++j) inputs.push_back(random_vector(ec.input_dim, rng));
        std::vector<double> q0 = ae.encoder().flatten();
        const std::size_t n_enc = q0.size();
        const auto dec0 = ae.decoder().flatten();
        q0.insert(q0.end(), dec0.begin(), dec0.end());
        auto ae_loss = [&](const std::vector<double>& q) {
            AEUnit probe = ae;
            probe.encoder().unflatten(std::span<const double>(q).subspan(0, n_enc));
            probe.decoder().unflatten(std::span<const double>(q).subspan(n_enc));
            return probe.gradients(inputs).loss;
        };
        const auto fd_ae = central_difference(ae_loss, q0, h);
        AEUnit ae_stepped = ae;
        ae_stepped.update(inputs, 1.0);
        std::vector<double> q1 = ae_stepped.encoder().flatten();
        const auto dec1 = ae_stepped.decoder().flatten();
        q1.insert(q1.end(), dec1.begin(), dec1.end());
        const double e_ae = norm_rel_error(difference(q0, q1), fd_ae);

        res.max_rel_error_ar = std::max(res.max_rel_error_ar, e_ar);
        res.max_rel_error_ae = std::max(res.max_rel_error_ae, e_ae);
        ctx.metrics.add(i, "gradcheck", "ar_rel_error", e_ar);
        ctx.metrics.add(i, "gradcheck", "ae_rel_error", e_ae);
    }
    ctx.metrics.add(instances, "gradcheck", "max_rel_error",
                    std::max(res.max_rel_error_ar, res.max_rel_error_ae));
    ctx.final_state.put_text("experiment", "gradcheck");
    ctx.final_state.put("gradcheck/max_rel_error", {res.max_rel_error_ar, res.max_rel_error_ae});
    ctx.summary = "gradcheck: " + std::to_string(instances) + " instances, max relative error AR " +
                  format_real(res.max_rel_error_ar) + ", AE " + format_real(res.max_rel_error_ae);
    return res;
}

}  // namespace mhpm
