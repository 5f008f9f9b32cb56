#include "mhpm/unit.hpp"

#include <algorithm>
#include <cmath>

#include "mhpm/errors.hpp"

namespace mhpm {

namespace {

void check_eta(double eta) {
    require(std::isfinite(eta) && eta >= 0.0, "learning rate must be finite and nonnegative");
}

// W1 = eps (I + noise), W2 = (I + noise) / eps: tanh is near-linear at the
// scale eps, so the map starts as approximately the identity for small inputs.
// eps stays moderate because the W1 path's step size grows like 1/eps^2.
TrainableMap near_identity(std::size_t dim, std::size_t hidden, Rng& rng) {
    constexpr double eps = 0.5;
    constexpr double noise = 1e-3;
    TrainableMap m(dim, hidden, dim);
    auto W1 = m.W1();
    auto W2 = m.W2();
    for (std::size_t r = 0; r < hidden; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            W1[r * dim + c] = eps * ((r == c ? 1.0 : 0.0) + rng.uniform(-noise, noise));
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < hidden; ++c)
            W2[r * hidden + c] = ((r == c ? 1.0 : 0.0) + rng.uniform(-noise, noise)) / eps;
    return m;
}

}  // namespace

ARUnit::ARUnit(const ARConfig& cfg, Rng& init_rng) : cfg_(cfg) {
    require(cfg.input_dim > 0 && cfg.window > 0, "ARUnit: input_dim and window must be positive");
    const std::size_t in = cfg.window * cfg.input_dim + cfg.context_dim;
    const std::size_t hidden = cfg.hidden ? cfg.hidden : TrainableMap::default_hidden(in, cfg.input_dim);
    map_ = TrainableMap::uniform(in, hidden, cfg.input_dim, init_rng, cfg.init_scale);
    window_.assign(cfg.window * cfg.input_dim, 0.0);
}

std::vector<double> ARUnit::input_for(const SignalVector& context) const {
    require_dim(cfg_.context_dim, context.dim(), "ARUnit context");
    std::vector<double> x;
    x.reserve(map_.in_dim());
    x.insert(x.end(), window_.begin(), window_.end());
    x.insert(x.end(), context.values().begin(), context.values().end());
    return x;
}

SignalVector ARUnit::predict(const SignalVector& context) const {
    return SignalVector(map_.trace(input_for(context)).y);
}

double ARUnit::observe(const SignalVector& context, const SignalVector& actual, double eta_eff,
                       SignalVector* prediction) {
    require_dim(cfg_.input_dim, actual.dim(), "ARUnit actual");
    check_eta(eta_eff);
    const MapTrace tr = map_.trace(input_for(context));
    std::vector<double> dy(cfg_.input_dim);
    double loss = 0.0;
    for (std::size_t i = 0; i < dy.size(); ++i) {
        dy[i] = tr.y[i] - actual[i];
        loss += dy[i] * dy[i];
    }
    loss *= 0.5;
    if (prediction) *prediction = SignalVector(tr.y);
    if (eta_eff > 0.0) map_.apply(map_.backward(tr, dy), eta_eff);
    std::rotate(window_.begin(), window_.begin() + static_cast<std::ptrdiff_t>(cfg_.input_dim), window_.end());
    std::copy(actual.values().begin(), actual.values().end(),
              window_.end() - static_cast<std::ptrdiff_t>(cfg_.input_dim));
    ++seen_;
    return loss;
}

void ARUnit::restore_window(std::span<const double> flat, std::size_t seen) {
    require_dim(window_.size(), flat.size(), "ARUnit::restore_window");
    std::copy(flat.begin(), flat.end(), window_.begin());
    seen_ = seen;
}

AEUnit::AEUnit(const AEConfig& cfg, Rng& init_rng) : cfg_(cfg) {
    require(cfg.k > 0 && cfg.input_dim > 0 && cfg.summary_dim > 0, "AEUnit: dimensions must be positive");
    const std::size_t flat = cfg.k * cfg.input_dim;
    const std::size_t enc_h = cfg.hidden ? cfg.hidden : TrainableMap::default_hidden(flat, cfg.summary_dim);
    const std::size_t dec_h = cfg.hidden ? cfg.hidden : TrainableMap::default_hidden(cfg.summary_dim, flat);
    if (cfg.identity_init) {
        require(cfg.k == 1 && cfg.input_dim == cfg.summary_dim, "AEUnit: identity_init needs k == 1 and equal dims");
        encoder_ = near_identity(flat, enc_h, init_rng);
        decoder_ = near_identity(flat, dec_h, init_rng);
    } else {
        encoder_ = TrainableMap::uniform(flat, enc_h, cfg.summary_dim, init_rng, cfg.init_scale);
        decoder_ = TrainableMap::uniform(cfg.summary_dim, dec_h, flat, init_rng, cfg.init_scale);
    }
    // One unit, one owner: both halves share the encoder's tag.
    decoder_.set_tag(encoder_.tag());
}

std::vector<double> AEUnit::flatten_inputs(std::span<const SignalVector> inputs) const {
    require(inputs.size() == cfg_.k, "AEUnit: expected " + std::to_string(cfg_.k) + " inputs, got " +
                                         std::to_string(inputs.size()));
    std::vector<double> x;
    x.reserve(cfg_.k * cfg_.input_dim);
    for (const auto& v : inputs) {
        require_dim(cfg_.input_dim, v.dim(), "AEUnit input");
        x.insert(x.end(), v.values().begin(), v.values().end());
    }
    return x;
}

SignalVector AEUnit::summarize(std::span<const SignalVector> inputs) const {
    return SignalVector(encoder_.trace(flatten_inputs(inputs)).y);
}

std::vector<SignalVector> AEUnit::reconstruct(const SignalVector& summary) const {
    require_dim(cfg_.summary_dim, summary.dim(), "AEUnit summary");
    const SignalVector flat = decoder_.forward(summary);
    std::vector<SignalVector> out;
    out.reserve(cfg_.k);
    for (std::size_t i = 0; i < cfg_.k; ++i) out.push_back(flat.slice(i * cfg_.input_dim, cfg_.input_dim));
    return out;
}

AEUnit::Gradients AEUnit::gradients(std::span<const SignalVector> inputs) const {
    const std::vector<double> x = flatten_inputs(inputs);
    const MapTrace enc = encoder_.trace(x);
    const MapTrace dec = decoder_.trace(enc.y);
    std::vector<double> dy(x.size());
    Gradients g;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dy[i] = dec.y[i] - x[i];
        g.loss += dy[i] * dy[i];
    }
    g.loss *= 0.5;
    g.reconstruction = dec.y;
    std::vector<double> dsummary;
    g.decoder = decoder_.backward(dec, dy, &dsummary);
    g.encoder = encoder_.backward(enc, dsummary);
    return g;
}

double AEUnit::update(std::span<const SignalVector> inputs, double eta_eff,
                      std::vector<SignalVector>* reconstruction) {
    check_eta(eta_eff);
    const Gradients g = gradients(inputs);
    if (reconstruction) {
        reconstruction->clear();
        for (std::size_t i = 0; i < cfg_.k; ++i)
            reconstruction->push_back(SignalVector(std::vector<double>(
                g.reconstruction.begin() + static_cast<std::ptrdiff_t>(i * cfg_.input_dim),
                g.reconstruction.begin() + static_cast<std::ptrdiff_t>((i + 1) * cfg_.input_dim))));
    }
    if (eta_eff == 0.0) return g.loss;
    if (!encoder_.step_is_finite(g.encoder, eta_eff) || !decoder_.step_is_finite(g.decoder, eta_eff))
        throw ContractError("AEUnit::update: non-finite gradient step");
    encoder_.apply(g.encoder, eta_eff);
    decoder_.apply(g.decoder, eta_eff);
    return g.loss;
}

}  // namespace mhpm
