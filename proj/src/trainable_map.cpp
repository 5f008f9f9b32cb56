#include "mhpm/trainable_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mhpm/errors.hpp"
#include "mhpm/kernels.hpp"

namespace mhpm {

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::vector<double> MapGradient::dense() const {
    std::vector<double> g;
    g.reserve(dz.size() * x.size() + dz.size() + dy.size() * h.size() + dy.size());
    for (double a : dz)
        for (double b : x) g.push_back(a * b);
    g.insert(g.end(), dz.begin(), dz.end());
    for (double a : dy)
        for (double b : h) g.push_back(a * b);
    g.insert(g.end(), dy.begin(), dy.end());
    return g;
}

TrainableMap::TrainableMap(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim)
    : in_(in_dim),
      hidden_(hidden_dim),
      out_(out_dim),
      W1_(hidden_dim * in_dim, 0.0),
      b1_(hidden_dim, 0.0),
      W2_(out_dim * hidden_dim, 0.0),
      b2_(out_dim, 0.0),
      tag_(locality::next_tag()) {
    require(in_dim > 0 && hidden_dim > 0 && out_dim > 0, "TrainableMap: dimensions must be positive");
}

TrainableMap TrainableMap::uniform(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim, Rng& rng,
                                   double scale) {
    TrainableMap m(in_dim, hidden_dim, out_dim);
    for (auto* block : {&m.W1_, &m.b1_, &m.W2_, &m.b2_})
        for (double& p : *block) p = rng.uniform(-scale, scale);
    return m;
}

std::size_t TrainableMap::default_hidden(std::size_t in_dim, std::size_t out_dim) {
    return 2 * std::max(in_dim, out_dim);
}

std::size_t TrainableMap::param_count() const { return W1_.size() + b1_.size() + W2_.size() + b2_.size(); }

MapTrace TrainableMap::trace(std::span<const double> x) const {
    require_dim(in_, x.size(), "TrainableMap input");
    locality::touch(tag_);
    MapTrace tr;
    tr.x.assign(x.begin(), x.end());
    tr.h.resize(hidden_);
    tr.y.resize(out_);
    kernels::affine(W1_, b1_, tr.x, tr.h);
    for (double& v : tr.h) v = std::tanh(v);
    kernels::affine(W2_, b2_, tr.h, tr.y);
    return tr;
}

SignalVector TrainableMap::forward(const SignalVector& x) const { return SignalVector(trace(x.values()).y); }

MapGradient TrainableMap::backward(const MapTrace& tr, std::span<const double> dy, std::vector<double>* dx) const {
    require_dim(out_, dy.size(), "TrainableMap output gradient");
    locality::touch(tag_);
    MapGradient g;
    g.x = tr.x;
    g.h = tr.h;
    g.dy.assign(dy.begin(), dy.end());
    g.dz.resize(hidden_);
    kernels::affine_transpose(W2_, out_, hidden_, g.dy, g.dz);
    for (std::size_t j = 0; j < hidden_; ++j) g.dz[j] *= 1.0 - tr.h[j] * tr.h[j];
    if (dx) {
        dx->resize(in_);
        kernels::affine_transpose(W1_, hidden_, in_, g.dz, *dx);
    }
    return g;
}

bool TrainableMap::step_is_finite(const MapGradient& g, double eta) const {
    if (!std::isfinite(eta)) return false;
    if (!all_finite(g.dy) || !all_finite(g.dz) || !all_finite(g.x) || !all_finite(g.h)) return false;
    const double step1 = eta * max_abs(g.dz) * std::max(1.0, max_abs(g.x));
    const double step2 = eta * max_abs(g.dy) * std::max(1.0, max_abs(g.h));
    return std::isfinite(max_abs(W1_) + max_abs(b1_) + step1) && std::isfinite(max_abs(W2_) + max_abs(b2_) + step2);
}

void TrainableMap::apply(const MapGradient& g, double eta) {
    require_dim(hidden_, g.dz.size(), "MapGradient hidden");
    require_dim(out_, g.dy.size(), "MapGradient output");
    if (!step_is_finite(g, eta)) throw ContractError("TrainableMap::apply: non-finite gradient step");
    locality::touch(tag_);
    kernels::rank1_update(W1_, eta, g.dz, g.x);
    for (std::size_t j = 0; j < hidden_; ++j) b1_[j] -= eta * g.dz[j];
    kernels::rank1_update(W2_, eta, g.dy, g.h);
    for (std::size_t i = 0; i < out_; ++i) b2_[i] -= eta * g.dy[i];
}

double TrainableMap::update(const SignalVector& x, const SignalVector& target, double eta) {
    require_dim(out_, target.dim(), "TrainableMap target");
    require(std::isfinite(eta) && eta >= 0.0, "TrainableMap::update: eta must be finite and nonnegative");
    const MapTrace tr = trace(x.values());
    std::vector<double> dy(out_);
    double loss = 0.0;
    for (std::size_t i = 0; i < out_; ++i) {
        dy[i] = tr.y[i] - target[i];
        loss += dy[i] * dy[i];
    }
    loss *= 0.5;
    if (eta == 0.0) return loss;
    apply(backward(tr, dy), eta);
    return loss;
}

std::vector<double> TrainableMap::flatten() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (const auto* block : {&W1_, &b1_, &W2_, &b2_}) flat.insert(flat.end(), block->begin(), block->end());
    return flat;
}

void TrainableMap::unflatten(std::span<const double> flat) {
    require_dim(param_count(), flat.size(), "TrainableMap::unflatten");
    require(all_finite(flat), "TrainableMap::unflatten: non-finite parameter");
    auto it = flat.begin();
    for (auto* block : {&W1_, &b1_, &W2_, &b2_}) {
        std::copy(it, it + static_cast<std::ptrdiff_t>(block->size()), block->begin());
        it += static_cast<std::ptrdiff_t>(block->size());
    }
}

}  // namespace mhpm
