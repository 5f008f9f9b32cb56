#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mhpm/locality.hpp"
#include "mhpm/rng.hpp"
#include "mhpm/signal.hpp"

namespace mhpm {

// Forward-pass intermediates kept for the backward pass.
struct MapTrace {
    std::vector<double> x;  // input
    std::vector<double> h;  // tanh(W1 x + b1)
    std::vector<double> y;  // W2 h + b2
};

// Gradient of a scalar loss w.r.t. the parameters of one map, stored in
// factored form: dW2 = dy h^T, db2 = dy, dW1 = dz x^T, db1 = dz.
struct MapGradient {
    std::vector<double> x, h, dy, dz;

    // Expanded gradient in flat parameter order (W1, b1, W2, b2).
    std::vector<double> dense() const;
};

// Single-hidden-layer map  y = W2 tanh(W1 x + b1) + b2  with closed-form
// gradients. Weights are row-major.
class TrainableMap {
public:
    TrainableMap() = default;
    // All parameters zero.
    TrainableMap(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim);

    // Parameters uniform in [-scale, scale], drawn in flat order.
    static TrainableMap uniform(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim, Rng& rng,
                                double scale = 0.1);

    // Default hidden width: 2 * max(in, out).
    static std::size_t default_hidden(std::size_t in_dim, std::size_t out_dim);

    std::size_t in_dim() const { return in_; }
    std::size_t hidden_dim() const { return hidden_; }
    std::size_t out_dim() const { return out_; }
    std::size_t param_count() const;

    SignalVector forward(const SignalVector& x) const;
    MapTrace trace(std::span<const double> x) const;

    // Backpropagate dL/dy. Optionally also writes dL/dx into `dx`.
    MapGradient backward(const MapTrace& tr, std::span<const double> dy, std::vector<double>* dx = nullptr) const;

    // True when a step of size eta along g keeps every parameter finite.
    bool step_is_finite(const MapGradient& g, double eta) const;
    // Parameters -= eta * g. Throws ContractError (parameters untouched) when
    // the step would produce a non-finite value.
    void apply(const MapGradient& g, double eta);

    // One gradient step on 0.5 ||target - forward(x)||^2; returns the loss
    // measured before the step.
    double update(const SignalVector& x, const SignalVector& target, double eta);

    std::vector<double> flatten() const;
    void unflatten(std::span<const double> flat);

    std::span<const double> W1() const { return W1_; }
    std::span<const double> b1() const { return b1_; }
    std::span<const double> W2() const { return W2_; }
    std::span<const double> b2() const { return b2_; }
    std::span<double> W1() { return W1_; }
    std::span<double> b1() { return b1_; }
    std::span<double> W2() { return W2_; }
    std::span<double> b2() { return b2_; }

    locality::UnitTag tag() const { return tag_; }
    void set_tag(locality::UnitTag t) { tag_ = t; }

    friend bool operator==(const TrainableMap& a, const TrainableMap& b) {
        return a.in_ == b.in_ && a.hidden_ == b.hidden_ && a.out_ == b.out_ && a.W1_ == b.W1_ && a.b1_ == b.b1_ &&
               a.W2_ == b.W2_ && a.b2_ == b.b2_;
    }

private:
    std::size_t in_ = 0, hidden_ = 0, out_ = 0;
    std::vector<double> W1_, b1_, W2_, b2_;
    locality::UnitTag tag_ = 0;
};

}  // namespace mhpm
