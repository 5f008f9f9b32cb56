#include "mhpm/heterarchy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mhpm/checkpoint.hpp"
#include "mhpm/errors.hpp"
#include "mhpm/locality.hpp"
#include "mhpm/rng.hpp"

namespace mhpm {

namespace {

ARConfig ar_config(const NodeConfig& cfg, std::size_t context_dim) {
    ARConfig a;
    a.input_dim = cfg.input_dim;
    a.context_dim = context_dim;
    a.window = cfg.window ? cfg.window : cfg.k;
    a.hidden = cfg.ar_hidden;
    a.base_lr = cfg.base_lr;
    a.init_scale = cfg.init_scale;
    return a;
}

AEConfig ae_config(const NodeConfig& cfg) {
    AEConfig a;
    a.k = cfg.k;
    a.input_dim = cfg.input_dim;
    a.summary_dim = cfg.summary_dim;
    a.hidden = cfg.ae_hidden;
    a.base_lr = cfg.base_lr;
    a.init_scale = cfg.init_scale;
    a.identity_init = cfg.ae_identity_init;
    return a;
}

std::vector<double> flat_of(std::span<const SignalVector> vs) {
    std::vector<double> out;
    for (const auto& v : vs) out.insert(out.end(), v.values().begin(), v.values().end());
    return out;
}

}  // namespace

HeterarchyGraph::HeterarchyGraph(std::uint64_t seed) : seed_(seed) {}

void HeterarchyGraph::require_unstarted(const char* what) const {
    require(!started(), std::string(what) + ": topology is frozen once the graph has stepped");
}

NodeId HeterarchyGraph::insert(CorticalNode n) {
    require(!n.config.name.empty(), "node name must be nonempty");
    require(!find(n.config.name), "duplicate node name '" + n.config.name + "'");
    require(n.config.k > 0 && n.config.input_dim > 0 && n.config.summary_dim > 0,
            "node '" + n.config.name + "': k and dims must be positive");
    require(std::isfinite(n.config.base_lr) && n.config.base_lr > 0.0,
            "node '" + n.config.name + "': base_lr must be positive");
    n.id = NodeId{static_cast<std::uint32_t>(nodes_.size())};
    Rng ar_rng(derive_seed(seed_, n.config.name + "/ar"));
    Rng ae_rng(derive_seed(seed_, n.config.name + "/ae"));
    n.ar = ARUnit(ar_config(n.config, 0), ar_rng);
    n.ae = AEUnit(ae_config(n.config), ae_rng);
    n.last_prediction = SignalVector::zeros(n.config.input_dim);
    nodes_.push_back(std::move(n));
    order_cache_.clear();
    return nodes_.back().id;
}

NodeId HeterarchyGraph::add_leaf(const NodeConfig& cfg, const std::string& channel) {
    require_unstarted("add_leaf");
    require(!channel.empty(), "channel name must be nonempty");
    for (const auto& n : nodes_)
        require(n.channel != channel, "channel '" + channel + "' is already bound");
    CorticalNode n;
    n.config = cfg;
    n.channel = channel;
    n.period = 1;
    return insert(std::move(n));
}

NodeId HeterarchyGraph::add_node(const NodeConfig& cfg) {
    require_unstarted("add_node");
    CorticalNode n;
    n.config = cfg;
    return insert(std::move(n));
}

const CorticalNode& HeterarchyGraph::node(NodeId id) const {
    require(id.value < nodes_.size(), "unknown node id " + std::to_string(id.value));
    return nodes_[id.value];
}

CorticalNode& HeterarchyGraph::node(NodeId id) {
    require(id.value < nodes_.size(), "unknown node id " + std::to_string(id.value));
    return nodes_[id.value];
}

std::optional<NodeId> HeterarchyGraph::find(const std::string& name) const {
    for (const auto& n : nodes_)
        if (n.config.name == name) return n.id;
    return std::nullopt;
}

bool HeterarchyGraph::reaches(NodeId from, NodeId to) const {
    std::vector<NodeId> stack{from};
    std::vector<bool> seen(nodes_.size(), false);
    while (!stack.empty()) {
        NodeId cur = stack.back();
        stack.pop_back();
        if (cur == to) return true;
        if (seen[cur.value]) continue;
        seen[cur.value] = true;
        for (NodeId p : nodes_[cur.value].parents) stack.push_back(p);
    }
    return false;
}

void HeterarchyGraph::rebuild_ar(CorticalNode& n) {
    std::size_t ctx = 0;
    for (NodeId p : n.parents) ctx += nodes_[p.value].config.input_dim;
    Rng rng(derive_seed(seed_, n.config.name + "/ar"));
    n.ar = ARUnit(ar_config(n.config, ctx), rng);
}

void HeterarchyGraph::add_edge(NodeId lower, NodeId higher) {
    require_unstarted("add_edge");
    CorticalNode& lo = node(lower);
    CorticalNode& hi = node(higher);
    const std::string what = "edge " + lo.config.name + " -> " + hi.config.name;
    require(lower != higher, what + ": self-loop");
    require(!hi.is_leaf(), what + ": a leaf is fed by its channel, not by another node");
    require(!hi.is_merge(), what + ": merge nodes are wired with connect_merge");
    require(hi.children.empty(), what + ": node already has a child; use connect_merge to combine inputs");
    require(lo.period > 0, what + ": lower node is not yet fed by any input");
    require(!reaches(higher, lower), what + ": would create a cycle");
    if (lo.ae.summary_dim() != hi.config.input_dim)
        throw ContractError(what + ": summary dim " + std::to_string(lo.ae.summary_dim()) + " of " + lo.config.name +
                            " != input dim " + std::to_string(hi.config.input_dim) + " of " + hi.config.name);
    hi.period = lo.emission_period();
    hi.children.push_back(lower);
    lo.parents.push_back(higher);
    rebuild_ar(lo);
    order_cache_.clear();
}

NodeId HeterarchyGraph::connect_merge(std::span<const NodeId> children, const MergeConfig& cfg) {
    require_unstarted("connect_merge");
    require(children.size() >= 2, "connect_merge: need at least 2 children, got " + std::to_string(children.size()));
    std::set<NodeId> distinct(children.begin(), children.end());
    require(distinct.size() == children.size(), "connect_merge: duplicate child");
    std::size_t merged_in = 0;
    const std::uint64_t period0 = node(children[0]).emission_period();
    for (NodeId c : children) {
        const CorticalNode& ch = node(c);
        require(ch.period > 0, "connect_merge: child " + ch.config.name + " is not yet fed by any input");
        if (ch.emission_period() != period0)
            throw ContractError("connect_merge: unequal child periods " + std::to_string(period0) + " (" +
                                node(children[0]).config.name + ") and " + std::to_string(ch.emission_period()) +
                                " (" + ch.config.name + ")");
        merged_in += ch.ae.summary_dim();
    }
    CorticalNode n;
    n.config = cfg.node;
    n.period = period0;
    n.children.assign(children.begin(), children.end());
    AEConfig m;
    m.k = 1;
    m.input_dim = merged_in;
    m.summary_dim = cfg.node.input_dim;
    m.hidden = cfg.merge_hidden;
    m.base_lr = cfg.node.base_lr;
    m.init_scale = cfg.node.init_scale;
    m.identity_init = cfg.merge_identity_init;
    Rng merge_rng(derive_seed(seed_, cfg.node.name + "/merge"));
    n.merge_ae = AEUnit(m, merge_rng);
    const NodeId id = insert(std::move(n));
    for (NodeId c : children) {
        CorticalNode& ch = nodes_[c.value];
        ch.parents.push_back(id);
        rebuild_ar(ch);
    }
    return id;
}

std::vector<NodeId> HeterarchyGraph::topological_order() const {
    if (order_cache_.size() == nodes_.size()) return order_cache_;
    // Kahn's algorithm, lowest id first among ready nodes.
    std::vector<std::size_t> pending(nodes_.size());
    std::set<NodeId> ready;
    for (const auto& n : nodes_) {
        pending[n.id.value] = n.children.size();
        if (n.children.empty()) ready.insert(n.id);
    }
    std::vector<NodeId> order;
    order.reserve(nodes_.size());
    while (!ready.empty()) {
        NodeId cur = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(cur);
        for (NodeId p : nodes_[cur.value].parents)
            if (--pending[p.value] == 0) ready.insert(p);
    }
    order_cache_ = order;
    return order;
}

SignalVector HeterarchyGraph::feedback_context(NodeId id) const {
    const CorticalNode& n = node(id);
    if (!feedback_enabled_) return SignalVector::zeros(n.ar.context_dim());
    std::vector<SignalVector> parts;
    parts.reserve(n.parents.size());
    for (NodeId p : n.parents) parts.push_back(nodes_[p.value].last_prediction);
    return SignalVector::concat(parts);
}

TickReport HeterarchyGraph::step(const std::map<std::string, SignalVector>& inputs, double m) {
    require(std::isfinite(m) && m >= 0.0, "modulation factor must be finite and nonnegative");
    std::size_t bound = 0;
    for (const auto& n : nodes_) {
        if (!n.is_leaf()) {
            require(!n.children.empty(), "node " + n.config.name + " has no input (no child and no channel)");
            continue;
        }
        ++bound;
        auto it = inputs.find(*n.channel);
        require(it != inputs.end(), "missing input for channel '" + *n.channel + "'");
        require_dim(n.config.input_dim, it->second.dim(), "channel input");
    }
    if (inputs.size() != bound)
        for (const auto& [ch, v] : inputs) {
            bool known = false;
            for (const auto& n : nodes_) known = known || n.channel == ch;
            require(known, "input for unbound channel '" + ch + "'");
        }

    TickReport report;
    report.tick = tick_;
    report.nodes.resize(nodes_.size());
    std::vector<std::optional<SignalVector>> emitted(nodes_.size());

    for (NodeId id : topological_order()) {
        CorticalNode& n = nodes_[id.value];
        NodeRecord& rec = report.nodes[id.value];
        SignalVector input;
        if (n.is_leaf()) {
            input = inputs.at(*n.channel);
        } else if (n.is_merge()) {
            std::vector<SignalVector> parts;
            for (NodeId c : n.children)
                if (emitted[c.value]) parts.push_back(*emitted[c.value]);
            if (parts.empty()) continue;
            require(parts.size() == n.children.size(), "merge node " + n.config.name + ": children out of step");
            const SignalVector merged = SignalVector::concat(parts);
            const std::span<const SignalVector> one(&merged, 1);
            locality::Scope scope(n.merge_ae->tag());
            rec.merge_loss = n.merge_ae->update(one, n.merge_ae->base_lr() * m);
            input = n.merge_ae->summarize(one);
        } else {
            const auto& e = emitted[n.children.front().value];
            if (!e) continue;
            input = *e;
        }

        rec.fired = true;
        const SignalVector ctx = feedback_context(id);
        {
            locality::Scope scope(n.ar.tag());
            rec.ar_loss = n.ar.observe(ctx, input, n.ar.base_lr() * m, &rec.prediction);
        }
        n.in_buffer.push_back(input);
        rec.input = std::move(input);
        if (n.in_buffer.size() == n.config.k) {
            locality::Scope scope(n.ae.tag());
            rec.ae_loss = n.ae.update(n.in_buffer, n.ae.base_lr() * m, &rec.reconstruction);
            rec.summary = n.ae.summarize(n.in_buffer);
            rec.emitted = true;
            rec.ae_inputs = std::move(n.in_buffer);
            n.in_buffer.clear();
            emitted[id.value] = rec.summary;
            ++n.emit_count;
        }
        ++n.fire_count;
        locality::Scope scope(n.ar.tag());
        n.last_prediction = n.ar.predict(ctx);
    }
    ++tick_;
    return report;
}

void HeterarchyGraph::save(Checkpoint& ckpt, const std::string& prefix) const {
    ckpt.put(prefix + "graph", {static_cast<double>(tick_), feedback_enabled_ ? 1.0 : 0.0,
                                static_cast<double>(nodes_.size())});
    for (const auto& n : nodes_) {
        const std::string p = prefix + n.config.name + "/";
        ckpt.put(p + "ar", n.ar.map().flatten());
        ckpt.put(p + "ar_window", std::vector<double>(n.ar.window().begin(), n.ar.window().end()));
        ckpt.put(p + "ae_encoder", n.ae.encoder().flatten());
        ckpt.put(p + "ae_decoder", n.ae.decoder().flatten());
        if (n.merge_ae) {
            ckpt.put(p + "merge_encoder", n.merge_ae->encoder().flatten());
            ckpt.put(p + "merge_decoder", n.merge_ae->decoder().flatten());
        }
        ckpt.put(p + "in_buffer", flat_of(n.in_buffer));
        ckpt.put(p + "last_prediction", n.last_prediction.vec());
        ckpt.put(p + "counters", {static_cast<double>(n.fire_count), static_cast<double>(n.emit_count),
                                  static_cast<double>(n.ar.seen())});
    }
}

void HeterarchyGraph::load(const Checkpoint& ckpt, const std::string& prefix) {
    const auto& g = ckpt.get(prefix + "graph");
    require(g.size() == 3, "checkpoint: malformed graph record");
    require(static_cast<std::size_t>(g[2]) == nodes_.size(), "checkpoint: node count differs from this graph");
    for (auto& n : nodes_) {
        const std::string p = prefix + n.config.name + "/";
        n.ar.map().unflatten(ckpt.get(p + "ar"));
        const auto& counters = ckpt.get(p + "counters");
        require(counters.size() == 3, "checkpoint: malformed counters for " + n.config.name);
        n.ar.restore_window(ckpt.get(p + "ar_window"), static_cast<std::size_t>(counters[2]));
        n.ae.encoder().unflatten(ckpt.get(p + "ae_encoder"));
        n.ae.decoder().unflatten(ckpt.get(p + "ae_decoder"));
        if (n.merge_ae) {
            n.merge_ae->encoder().unflatten(ckpt.get(p + "merge_encoder"));
            n.merge_ae->decoder().unflatten(ckpt.get(p + "merge_decoder"));
        }
        const auto& buf = ckpt.get(p + "in_buffer");
        const std::size_t d = n.config.input_dim;
        require(buf.size() % d == 0 && buf.size() / d < n.config.k, "checkpoint: bad in_buffer for " + n.config.name);
        n.in_buffer.clear();
        for (std::size_t i = 0; i < buf.size(); i += d)
            n.in_buffer.emplace_back(std::vector<double>(buf.begin() + static_cast<std::ptrdiff_t>(i),
                                                         buf.begin() + static_cast<std::ptrdiff_t>(i + d)));
        const auto& lp = ckpt.get(p + "last_prediction");
        require_dim(d, lp.size(), "checkpoint last_prediction");
        n.last_prediction = SignalVector(lp);
        n.fire_count = static_cast<std::uint64_t>(counters[0]);
        n.emit_count = static_cast<std::uint64_t>(counters[1]);
    }
    tick_ = static_cast<std::uint64_t>(g[0]);
    feedback_enabled_ = g[1] != 0.0;
}

HeterarchyGraph build_chain(const ChainConfig& cfg, std::uint64_t seed) {
    require(cfg.layers >= 1, "build_chain: need at least one layer");
    require(cfg.k >= 1, "build_chain: k must be positive");
    require(cfg.dims.size() == cfg.layers, "build_chain: " + std::to_string(cfg.layers) + " layers but " +
                                               std::to_string(cfg.dims.size()) + " dim entries");
    for (std::size_t l = 1; l < cfg.layers; ++l)
        if (cfg.dims[l].input_dim != cfg.dims[l - 1].summary_dim)
            throw ContractError("build_chain: layer " + std::to_string(l + 1) + " input_dim " +
                                std::to_string(cfg.dims[l].input_dim) + " != layer " + std::to_string(l) +
                                " summary_dim " + std::to_string(cfg.dims[l - 1].summary_dim));
    HeterarchyGraph g(seed);
    NodeId prev{};
    for (std::size_t l = 0; l < cfg.layers; ++l) {
        NodeConfig nc;
        nc.name = "L" + std::to_string(l + 1);
        nc.input_dim = cfg.dims[l].input_dim;
        nc.summary_dim = cfg.dims[l].summary_dim;
        nc.k = cfg.k;
        nc.window = cfg.window;
        nc.ar_hidden = cfg.hidden;
        nc.ae_hidden = cfg.hidden;
        nc.base_lr = cfg.base_lr;
        nc.init_scale = cfg.init_scale;
        if (l == 0) {
            prev = g.add_leaf(nc, cfg.channel);
        } else {
            NodeId cur = g.add_node(nc);
            g.add_edge(prev, cur);
            prev = cur;
        }
    }
    return g;
}

std::vector<std::uint64_t> tick_counts(std::uint64_t ticks, std::uint64_t k, std::size_t layers) {
    require(k >= 1, "tick_counts: k must be positive");
    std::vector<std::uint64_t> out;
    out.reserve(layers);
    std::uint64_t period = 1;
    for (std::size_t l = 0; l < layers; ++l) {
        out.push_back(period > ticks ? 0 : ticks / period);
        period = period > ticks / k ? ticks + 1 : period * k;  // saturate past T
    }
    return out;
}

}  // namespace mhpm
