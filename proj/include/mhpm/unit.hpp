#pragma once

// The universal building block: an autoregressive next-vector predictor (AR)
// and a k-input summarizer (AE). Both learn online from their own local error.

#include <cstddef>
#include <span>
#include <vector>

#include "mhpm/locality.hpp"
#include "mhpm/rng.hpp"
#include "mhpm/signal.hpp"
#include "mhpm/trainable_map.hpp"

namespace mhpm {

struct ARConfig {
    std::size_t input_dim = 1;
    std::size_t context_dim = 0;
    std::size_t window = 4;  // w
    std::size_t hidden = 0;  // 0 = TrainableMap::default_hidden
    double base_lr = 0.05;
    double init_scale = 0.1;
};

// Predicts the next input from a window of the last w inputs (oldest first,
// zero-padded until w inputs exist) concatenated with a context vector.
class ARUnit {
public:
    ARUnit() = default;
    ARUnit(const ARConfig& cfg, Rng& init_rng);

    const ARConfig& config() const { return cfg_; }
    std::size_t input_dim() const { return cfg_.input_dim; }
    std::size_t context_dim() const { return cfg_.context_dim; }
    std::size_t window_len() const { return cfg_.window; }
    double base_lr() const { return cfg_.base_lr; }

    // Pure.
    SignalVector predict(const SignalVector& context) const;

    // Predict, take one step of size eta_eff toward `actual`, then push
    // `actual` into the window. Returns the loss before the step; the
    // prediction that was scored is written to `prediction` when given.
    double observe(const SignalVector& context, const SignalVector& actual, double eta_eff,
                   SignalVector* prediction = nullptr);

    // Flattened window, oldest first.
    std::span<const double> window() const { return window_; }
    std::size_t seen() const { return seen_; }

    const TrainableMap& map() const { return map_; }
    TrainableMap& map() { return map_; }
    locality::UnitTag tag() const { return map_.tag(); }

    // Window state only; parameters go through map().
    void restore_window(std::span<const double> flat, std::size_t seen);

private:
    std::vector<double> input_for(const SignalVector& context) const;

    ARConfig cfg_;
    TrainableMap map_;
    std::vector<double> window_;
    std::size_t seen_ = 0;
};

struct AEConfig {
    std::size_t k = 4;
    std::size_t input_dim = 1;
    std::size_t summary_dim = 1;
    std::size_t hidden = 0;  // 0 = default for each of encoder/decoder
    double base_lr = 0.05;
    double init_scale = 0.1;
    // k == 1 and input_dim == summary_dim only: start both halves near the
    // identity map.
    bool identity_init = false;
};

// Compresses k consecutive inputs into one summary vector; the decoder exists
// to define the reconstruction training signal.
class AEUnit {
public:
    AEUnit() = default;
    AEUnit(const AEConfig& cfg, Rng& init_rng);

    const AEConfig& config() const { return cfg_; }
    std::size_t k() const { return cfg_.k; }
    std::size_t input_dim() const { return cfg_.input_dim; }
    std::size_t summary_dim() const { return cfg_.summary_dim; }
    double base_lr() const { return cfg_.base_lr; }

    SignalVector summarize(std::span<const SignalVector> inputs) const;
    std::vector<SignalVector> reconstruct(const SignalVector& summary) const;

    // One step on 0.5 ||inputs - decode(encode(inputs))||^2 through both halves.
    // Returns the loss before the step; the pre-step reconstruction is written
    // to `reconstruction` when given.
    double update(std::span<const SignalVector> inputs, double eta_eff,
                  std::vector<SignalVector>* reconstruction = nullptr);

    // Reconstruction loss and its gradients w.r.t. (encoder, decoder).
    struct Gradients {
        double loss = 0.0;
        MapGradient encoder, decoder;
        std::vector<double> reconstruction;  // flat, k * input_dim
    };
    Gradients gradients(std::span<const SignalVector> inputs) const;

    const TrainableMap& encoder() const { return encoder_; }
    const TrainableMap& decoder() const { return decoder_; }
    TrainableMap& encoder() { return encoder_; }
    TrainableMap& decoder() { return decoder_; }
    locality::UnitTag tag() const { return encoder_.tag(); }

private:
    std::vector<double> flatten_inputs(std::span<const SignalVector> inputs) const;

    AEConfig cfg_;
    TrainableMap encoder_, decoder_;
};

}  // namespace mhpm
