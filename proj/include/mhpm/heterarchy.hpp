#pragma once

// A DAG of cortical nodes. Summaries flow up (lower -> higher), AR predictions
// flow back down as context. A node fires whenever it receives an input: leaves
// every tick, higher nodes whenever their child(ren) emit a summary, i.e. every
// k-th firing of the child.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mhpm/signal.hpp"
#include "mhpm/unit.hpp"

namespace mhpm {

class Checkpoint;

struct NodeId {
    std::uint32_t value = 0;
    friend bool operator==(NodeId, NodeId) = default;
    friend auto operator<=>(NodeId, NodeId) = default;
};

struct NodeConfig {
    std::string name;              // unique; also names the node's RNG stream
    std::size_t input_dim = 1;
    std::size_t summary_dim = 1;
    std::size_t k = 4;
    std::size_t window = 0;        // 0 = k
    std::size_t ar_hidden = 0;     // 0 = default width
    std::size_t ae_hidden = 0;
    double base_lr = 0.05;
    double init_scale = 0.1;
    bool ae_identity_init = false;  // k == 1 and input_dim == summary_dim only
};

struct MergeConfig {
    // The node proper; its input_dim is the merged width (output of merge_ae).
    NodeConfig node;
    std::size_t merge_hidden = 0;
    bool merge_identity_init = false;  // needs merged width == sum of child summary widths
};

struct CorticalNode {
    NodeId id;
    NodeConfig config;
    ARUnit ar;
    AEUnit ae;
    std::optional<AEUnit> merge_ae;  // merge nodes only

    std::optional<std::string> channel;  // leaves only
    std::vector<NodeId> children;        // lower neighbours, ordered
    std::vector<NodeId> parents;         // higher neighbours, in edge-creation order

    std::vector<SignalVector> in_buffer;
    SignalVector last_prediction;        // AR prediction of this node's own next input
    std::uint64_t fire_count = 0;        // inputs processed
    std::uint64_t emit_count = 0;        // summaries sent upward
    std::uint64_t period = 0;            // ticks between inputs; 0 until wired

    bool is_leaf() const { return channel.has_value(); }
    bool is_merge() const { return merge_ae.has_value(); }
    std::uint64_t emission_period() const { return period * config.k; }
};

struct NodeRecord {
    bool fired = false;
    bool emitted = false;
    double ar_loss = 0.0;
    double ae_loss = 0.0;
    double merge_loss = 0.0;
    SignalVector input;                        // what the AR unit was trained toward
    SignalVector prediction;                   // the prediction scored against `input`
    SignalVector summary;                      // emitted summary (when emitted)
    std::vector<SignalVector> ae_inputs;       // the k inputs summarized (when emitted)
    std::vector<SignalVector> reconstruction;  // pre-update reconstruction (when emitted)
};

struct TickReport {
    std::uint64_t tick = 0;
    std::vector<NodeRecord> nodes;  // indexed by NodeId::value
};

class HeterarchyGraph {
public:
    explicit HeterarchyGraph(std::uint64_t seed = 1);

    // Leaf bound to an external channel.
    NodeId add_leaf(const NodeConfig& cfg, const std::string& channel);
    // Unwired interior node; connect it with add_edge.
    NodeId add_node(const NodeConfig& cfg);
    // lower's summaries become higher's input; higher's predictions become
    // part of lower's context. Rejects cycles, dimension and rate mismatches.
    void add_edge(NodeId lower, NodeId higher);
    // New merge node over >= 2 children with equal emission periods.
    NodeId connect_merge(std::span<const NodeId> children, const MergeConfig& cfg);

    // One global tick. `inputs` must hold exactly one vector per bound channel.
    TickReport step(const std::map<std::string, SignalVector>& inputs, double m);

    // Concatenated last predictions of the node's parents, edge order; zeros
    // when feedback is disabled.
    SignalVector feedback_context(NodeId id) const;

    // Ablation switch: when off every context is the zero vector.
    void set_feedback_enabled(bool on) { feedback_enabled_ = on; }
    bool feedback_enabled() const { return feedback_enabled_; }

    std::size_t size() const { return nodes_.size(); }
    const CorticalNode& node(NodeId id) const;
    CorticalNode& node(NodeId id);
    std::optional<NodeId> find(const std::string& name) const;
    std::uint64_t tick() const { return tick_; }
    std::uint64_t seed() const { return seed_; }
    bool started() const { return tick_ > 0; }
    // Bottom-up evaluation order.
    std::vector<NodeId> topological_order() const;

    void save(Checkpoint& ckpt, const std::string& prefix) const;
    void load(const Checkpoint& ckpt, const std::string& prefix);

private:
    NodeId insert(CorticalNode node);
    void rebuild_ar(CorticalNode& n);
    bool reaches(NodeId from, NodeId to) const;
    void require_unstarted(const char* what) const;

    std::uint64_t seed_;
    std::vector<CorticalNode> nodes_;
    std::uint64_t tick_ = 0;
    bool feedback_enabled_ = true;
    mutable std::vector<NodeId> order_cache_;
};

struct LayerDims {
    std::size_t input_dim;
    std::size_t summary_dim;
};

struct ChainConfig {
    std::size_t layers = 3;
    std::size_t k = 4;
    std::vector<LayerDims> dims;  // one per layer
    std::size_t window = 0;
    std::size_t hidden = 0;
    double base_lr = 0.05;
    double init_scale = 0.1;
    std::string channel = "input";
};

// Linear chain L1 <- L2 <- ... named "L1".."Ln"; layer l fires every k^(l-1)
// ticks. Throws ContractError naming the layers when dims do not line up.
HeterarchyGraph build_chain(const ChainConfig& cfg, std::uint64_t seed);

// floor(T / k^(l-1)) for l = 1..L.
std::vector<std::uint64_t> tick_counts(std::uint64_t ticks, std::uint64_t k, std::size_t layers);

}  // namespace mhpm
