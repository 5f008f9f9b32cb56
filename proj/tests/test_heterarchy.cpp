#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mhpm/checkpoint.hpp"
#include "mhpm/errors.hpp"
#include "mhpm/heterarchy.hpp"
#include "mhpm/locality.hpp"
#include "mhpm/rng.hpp"
#include "support.hpp"

using namespace mhpm;

namespace {

ChainConfig chain(std::size_t layers, std::size_t k = 4) {
    ChainConfig c;
    c.layers = layers;
    c.k = k;
    c.dims.clear();
    std::size_t in = 5;
    for (std::size_t l = 0; l < layers; ++l) {
        c.dims.push_back({in, 4});
        in = 4;
    }
    return c;
}

std::map<std::string, SignalVector> input_at(std::uint64_t t, std::size_t dim = 5) {
    return {{"input", SignalVector::one_hot(dim, (t * 7 + t / 3) % dim)}};
}

NodeConfig leaf_cfg(const std::string& name, std::size_t in, std::size_t summary, std::size_t k) {
    NodeConfig c;
    c.name = name;
    c.input_dim = in;
    c.summary_dim = summary;
    c.k = k;
    return c;
}

}  // namespace

TEST(BuildChain, ThreeLayerPeriods) {
    HeterarchyGraph g = build_chain(chain(3), 1);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g.node(*g.find("L1")).period, 1u);
    EXPECT_EQ(g.node(*g.find("L2")).period, 4u);
    EXPECT_EQ(g.node(*g.find("L3")).period, 16u);
    EXPECT_EQ(g.node(*g.find("L3")).ar.context_dim(), 0u);
    EXPECT_EQ(g.node(*g.find("L1")).ar.context_dim(), 4u);
}

TEST(BuildChain, SingleLayer) {
    HeterarchyGraph g = build_chain(chain(1), 1);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g.feedback_context(NodeId{0}).dim(), 0u);
    for (std::uint64_t t = 0; t < 10; ++t) g.step(input_at(t), 1.0);
    EXPECT_EQ(g.node(NodeId{0}).fire_count, 10u);
    EXPECT_EQ(g.node(NodeId{0}).emit_count, 2u);  // emitted, but nobody listens
}

TEST(BuildChain, DimMismatchNamesLayers) {
    ChainConfig c = chain(2);
    c.dims[0] = {5, 6};
    c.dims[1] = {8, 4};
    try {
        build_chain(c, 1);
        FAIL();
    } catch (const ContractError& e) {
        const std::string m = e.what();
        EXPECT_NE(m.find("layer 2"), std::string::npos) << m;
        EXPECT_NE(m.find("layer 1"), std::string::npos) << m;
    }
}

TEST(TickCounts, Examples) {
    EXPECT_EQ(tick_counts(64, 4, 3), (std::vector<std::uint64_t>{64, 16, 4}));
    EXPECT_EQ(tick_counts(5, 4, 3), (std::vector<std::uint64_t>{5, 1, 0}));
    EXPECT_EQ(tick_counts(9, 1, 4), (std::vector<std::uint64_t>{9, 9, 9, 9}));
    EXPECT_EQ(tick_counts(0, 4, 2), (std::vector<std::uint64_t>{0, 0}));
    EXPECT_EQ(tick_counts(100, 1000000, 6), (std::vector<std::uint64_t>{100, 0, 0, 0, 0, 0}));
}

TEST(GraphStep, ClockAfterKTicks) {
    HeterarchyGraph g = build_chain(chain(3), 1);
    for (std::uint64_t t = 0; t < 4; ++t) g.step(input_at(t), 1.0);
    EXPECT_EQ(g.node(NodeId{1}).fire_count, 1u);
    EXPECT_EQ(g.node(NodeId{2}).fire_count, 0u);
}

TEST(GraphStep, ClockInvariantProperty) {
    Rng rng(5);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t k = 1 + rng.below(4), layers = 1 + rng.below(4);
        const std::uint64_t T = rng.below(150);
        HeterarchyGraph g = build_chain(chain(layers, k), trial);
        for (std::uint64_t t = 0; t < T; ++t) {
            const TickReport r = g.step(input_at(t), 1.0);
            ASSERT_EQ(r.nodes.size(), layers);
            ASSERT_EQ(r.tick, t);
        }
        const auto expect = tick_counts(T, k, layers);
        for (std::size_t l = 0; l < layers; ++l)
            EXPECT_EQ(g.node(NodeId{static_cast<std::uint32_t>(l)}).fire_count, expect[l])
                << "k=" << k << " L=" << layers << " T=" << T << " layer " << l + 1;
        EXPECT_EQ(g.tick(), T);
    }
}

TEST(GraphStep, BufferInvariant) {
    HeterarchyGraph g = build_chain(chain(2), 1);
    for (std::uint64_t t = 0; t < 37; ++t) {
        const TickReport r = g.step(input_at(t), 1.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            ASSERT_LT(g.node(NodeId{static_cast<std::uint32_t>(i)}).in_buffer.size(), 4u);
            if (r.nodes[i].emitted) ASSERT_EQ(r.nodes[i].ae_inputs.size(), 4u);
        }
    }
}

TEST(GraphStep, FeedbackHeldConstantBetweenParentFirings) {
    HeterarchyGraph g = build_chain(chain(3), 2);
    std::vector<SignalVector> ctx;
    for (std::uint64_t t = 0; t < 64; ++t) {
        ctx.push_back(g.feedback_context(NodeId{0}));
        g.step(input_at(t), 1.0);
    }
    // L2 fires at the end of ticks 3, 7, 11, ...; L1 consumes it from the next tick.
    for (std::size_t t = 1; t < ctx.size(); ++t) {
        if (t % 4 == 0) continue;
        EXPECT_EQ(ctx[t], ctx[t - 1]) << "tick " << t;
    }
    EXPECT_EQ(ctx[0], SignalVector::zeros(4));
    EXPECT_NE(ctx[4], ctx[3]);
}

TEST(GraphStep, DeterministicReports) {
    auto run = [] {
        HeterarchyGraph g = build_chain(chain(3), 17);
        std::vector<double> flat;
        for (std::uint64_t t = 0; t < 80; ++t) {
            const TickReport r = g.step(input_at(t), 1.0 + 0.1 * (t % 3));
            for (const auto& n : r.nodes) {
                flat.push_back(n.fired);
                flat.push_back(n.ar_loss);
                flat.push_back(n.ae_loss);
                for (double v : n.prediction.values()) flat.push_back(v);
                for (double v : n.summary.values()) flat.push_back(v);
            }
        }
        return flat;
    };
    EXPECT_EQ(run(), run());
}

TEST(GraphStep, MissingAndUnboundChannels) {
    HeterarchyGraph g = build_chain(chain(2), 1);
    EXPECT_THROW(g.step({}, 1.0), ContractError);
    auto in = input_at(0);
    in["other"] = SignalVector::zeros(1);
    EXPECT_THROW(g.step(in, 1.0), ContractError);
    EXPECT_THROW(g.step({{"input", SignalVector::zeros(3)}}, 1.0), ContractError);
}

TEST(GraphStep, ZeroModulationFreezesLearning) {
    HeterarchyGraph g = build_chain(chain(2), 3);
    const auto ar = g.node(NodeId{0}).ar.map().flatten();
    const auto ae = g.node(NodeId{0}).ae.encoder().flatten();
    for (std::uint64_t t = 0; t < 20; ++t) g.step(input_at(t), 0.0);
    EXPECT_EQ(g.node(NodeId{0}).ar.map().flatten(), ar);
    EXPECT_EQ(g.node(NodeId{0}).ae.encoder().flatten(), ae);
}

TEST(GraphStep, LocalUpdatesOnly) {
    HeterarchyGraph g = build_chain(chain(3), 4);
    locality::set_enabled(true);
    locality::reset_counters();
    for (std::uint64_t t = 0; t < 200; ++t) g.step(input_at(t), 1.0);
    EXPECT_GT(locality::checks(), 0u);
    EXPECT_EQ(locality::violations(), 0u);
    locality::set_enabled(false);
}

TEST(FeedbackContext, Definition) {
    HeterarchyGraph g(1);
    const NodeId a = g.add_leaf(leaf_cfg("a", 2, 3, 1), "a");
    const NodeId p = g.add_node(leaf_cfg("p", 3, 2, 2));
    const NodeId q = g.add_leaf(leaf_cfg("q", 2, 3, 1), "q");
    g.add_edge(a, p);
    // never fired → zeros of the parent's prediction dim
    EXPECT_EQ(g.feedback_context(a), SignalVector::zeros(3));
    EXPECT_EQ(g.feedback_context(p).dim(), 0u);
    const NodeId r = g.add_node(leaf_cfg("r", 3, 2, 2));
    g.add_edge(q, r);
    (void)r;
    g.node(p).last_prediction = SignalVector{1.0, 2.0, 3.0};
    EXPECT_EQ(g.feedback_context(a), SignalVector({1.0, 2.0, 3.0}));
    g.set_feedback_enabled(false);
    EXPECT_EQ(g.feedback_context(a), SignalVector::zeros(3));
}

TEST(Heterarchy, MultipleParentsConcatenateInEdgeOrder) {
    HeterarchyGraph g(1);
    const NodeId v = g.add_leaf(leaf_cfg("v", 2, 3, 1), "v");
    const NodeId m = g.add_leaf(leaf_cfg("m", 2, 3, 1), "m");
    MergeConfig mc;
    mc.node = leaf_cfg("merge", 4, 2, 4);
    const NodeId children[] = {v, m};
    const NodeId mid = g.connect_merge(children, mc);
    EXPECT_EQ(g.node(mid).period, 1u);
    EXPECT_EQ(g.node(mid).merge_ae->input_dim(), 6u);
    EXPECT_EQ(g.node(mid).merge_ae->summary_dim(), 4u);
    // A second parent for v.
    const NodeId top = g.add_node(leaf_cfg("vtop", 3, 2, 2));
    g.add_edge(v, top);
    g.node(mid).last_prediction = SignalVector{1, 2, 3, 4};
    g.node(top).last_prediction = SignalVector{5, 6, 7};
    EXPECT_EQ(g.feedback_context(v), SignalVector({1, 2, 3, 4, 5, 6, 7}));
    EXPECT_EQ(g.node(v).ar.context_dim(), 7u);
    EXPECT_EQ(g.feedback_context(m).dim(), 4u);
}

TEST(ConnectMerge, ShapeArithmetic) {
    HeterarchyGraph g(1);
    const NodeId a = g.add_leaf(leaf_cfg("a", 3, 4, 4), "a");
    const NodeId b = g.add_leaf(leaf_cfg("b", 2, 4, 4), "b");
    MergeConfig mc;
    mc.node = leaf_cfg("m", 6, 3, 4);
    const NodeId ch[] = {a, b};
    const NodeId m = g.connect_merge(ch, mc);
    EXPECT_EQ(g.node(m).merge_ae->input_dim(), 8u);
    EXPECT_EQ(g.node(m).merge_ae->summary_dim(), 6u);
    EXPECT_EQ(g.node(m).period, 4u);
    EXPECT_EQ(g.node(a).parents, std::vector<NodeId>{m});
    EXPECT_EQ(g.node(b).parents, std::vector<NodeId>{m});
}

TEST(ConnectMerge, UnequalPeriodsRejected) {
    HeterarchyGraph g(1);
    const NodeId a = g.add_leaf(leaf_cfg("a", 3, 4, 4), "a");
    const NodeId b = g.add_leaf(leaf_cfg("b", 3, 4, 4), "b");
    const NodeId b2 = g.add_node(leaf_cfg("b2", 4, 4, 4));
    g.add_edge(b, b2);
    MergeConfig mc;
    mc.node = leaf_cfg("m", 6, 3, 4);
    const NodeId ch[] = {a, b2};
    try {
        g.connect_merge(ch, mc);
        FAIL();
    } catch (const ContractError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("4"), std::string::npos);
        EXPECT_NE(msg.find("16"), std::string::npos) << msg;
    }
    const NodeId one[] = {a};
    EXPECT_THROW(g.connect_merge(one, mc), ContractError);
}

TEST(ConnectMerge, MergeStepsAndLearnsLocally) {
    HeterarchyGraph g(9);
    const NodeId v = g.add_leaf(leaf_cfg("v", 2, 2, 1), "v");
    const NodeId m = g.add_leaf(leaf_cfg("m", 2, 2, 1), "m");
    MergeConfig mc;
    mc.node = leaf_cfg("merge", 3, 2, 4);
    const NodeId ch[] = {v, m};
    const NodeId mid = g.connect_merge(ch, mc);
    locality::set_enabled(true);
    locality::reset_counters();
    for (int t = 0; t < 40; ++t) {
        const TickReport r =
            g.step({{"v", SignalVector{std::sin(t), std::cos(t)}}, {"m", SignalVector{0.5, -0.5}}}, 1.0);
        ASSERT_TRUE(r.nodes[mid.value].fired);
        ASSERT_EQ(r.nodes[mid.value].input.dim(), 3u);
    }
    EXPECT_EQ(locality::violations(), 0u);
    locality::set_enabled(false);
    EXPECT_EQ(g.node(mid).fire_count, 40u);
    EXPECT_EQ(g.node(mid).emit_count, 10u);
}

TEST(Heterarchy, CyclesAndBadEdgesRejected) {
    HeterarchyGraph g(1);
    const NodeId a = g.add_leaf(leaf_cfg("a", 2, 2, 2), "a");
    const NodeId b = g.add_node(leaf_cfg("b", 2, 2, 2));
    const NodeId c = g.add_node(leaf_cfg("c", 2, 2, 2));
    g.add_edge(a, b);
    g.add_edge(b, c);
    EXPECT_THROW(g.add_edge(c, b), ContractError);  // b already has a child
    const NodeId d = g.add_node(leaf_cfg("d", 2, 2, 2));
    EXPECT_THROW(g.add_edge(d, b), ContractError);  // d unfed
    EXPECT_THROW(g.add_edge(a, a), ContractError);
    EXPECT_THROW(g.add_edge(c, a), ContractError);  // leaf target
    EXPECT_THROW(g.add_leaf(leaf_cfg("a", 2, 2, 2), "x"), ContractError);  // duplicate name
    EXPECT_THROW(g.add_leaf(leaf_cfg("z", 2, 2, 2), "a"), ContractError);  // channel taken
    const NodeId e = g.add_node(leaf_cfg("e", 3, 2, 2));
    EXPECT_THROW(g.add_edge(c, e), ContractError);  // dim mismatch
}

TEST(Heterarchy, TopologicalOrderIsBottomUp) {
    HeterarchyGraph g(1);
    const NodeId top = g.add_node(leaf_cfg("top", 2, 2, 1));  // created first, wired last
    const NodeId a = g.add_leaf(leaf_cfg("a", 2, 2, 1), "a");
    const NodeId b = g.add_leaf(leaf_cfg("b", 2, 2, 1), "b");
    MergeConfig mc;
    mc.node = leaf_cfg("m", 2, 2, 1);
    const NodeId ch[] = {a, b};
    const NodeId m = g.connect_merge(ch, mc);
    g.add_edge(m, top);
    EXPECT_EQ(g.topological_order(), (std::vector<NodeId>{a, b, m, top}));
}

TEST(Heterarchy, RandomWiringStaysAcyclic) {
    // Property: whatever sequence of edges is attempted, accepted edges never
    // form a cycle (every node appears in the bottom-up order).
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        HeterarchyGraph g(trial);
        std::vector<NodeId> ids;
        for (int i = 0; i < 3; ++i) ids.push_back(g.add_leaf(leaf_cfg("leaf" + std::to_string(i), 2, 2, 2), "c" + std::to_string(i)));
        for (int i = 0; i < 5; ++i) ids.push_back(g.add_node(leaf_cfg("n" + std::to_string(i), 2, 2, 2)));
        for (int attempt = 0; attempt < 60; ++attempt) {
            const NodeId lo = ids[rng.below(ids.size())], hi = ids[rng.below(ids.size())];
            try {
                g.add_edge(lo, hi);
            } catch (const ContractError&) {
            }
        }
        EXPECT_EQ(g.topological_order().size(), g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto& n = g.node(NodeId{static_cast<std::uint32_t>(i)});
            for (NodeId p : n.parents) EXPECT_NE(p, n.id);
        }
    }
}

TEST(Heterarchy, FrozenAfterStart) {
    HeterarchyGraph g = build_chain(chain(1), 1);
    g.step(input_at(0), 1.0);
    EXPECT_THROW(g.add_node(leaf_cfg("late", 4, 4, 4)), ContractError);
}

TEST(Heterarchy, UnwiredNodeRejectedAtStep) {
    HeterarchyGraph g = build_chain(chain(1), 1);
    g.add_node(leaf_cfg("orphan", 4, 4, 4));
    EXPECT_THROW(g.step(input_at(0), 1.0), ContractError);
}

TEST(Heterarchy, CheckpointRoundTripContinuesIdentically) {
    HeterarchyGraph a = build_chain(chain(3), 21);
    for (std::uint64_t t = 0; t < 45; ++t) a.step(input_at(t), 1.0);
    Checkpoint ck;
    a.save(ck, "g/");
    std::stringstream ss;
    ck.write(ss);
    const Checkpoint back = Checkpoint::read(ss);

    HeterarchyGraph b = build_chain(chain(3), 21);
    b.load(back, "g/");
    EXPECT_EQ(b.tick(), 45u);
    for (std::uint64_t t = 45; t < 120; ++t) {
        const TickReport ra = a.step(input_at(t), 1.0), rb = b.step(input_at(t), 1.0);
        for (std::size_t i = 0; i < ra.nodes.size(); ++i) {
            ASSERT_EQ(ra.nodes[i].ar_loss, rb.nodes[i].ar_loss) << t;
            ASSERT_EQ(ra.nodes[i].prediction, rb.nodes[i].prediction) << t;
            ASSERT_EQ(ra.nodes[i].summary, rb.nodes[i].summary) << t;
        }
    }
}

TEST(Checkpoint, TextFormat) {
    Checkpoint ck;
    ck.put("x", {1.0 / 3.0, -2.5e-300, 0.0});
    ck.put_text("rng", "1 2 3");
    std::stringstream ss;
    ck.write(ss);
    EXPECT_EQ(ss.str().rfind("mhpm-checkpoint 1\n", 0), 0u);
    const Checkpoint back = Checkpoint::read(ss);
    EXPECT_EQ(back.get("x"), ck.get("x"));
    EXPECT_EQ(back.get_text("rng"), "1 2 3");
    EXPECT_THROW(back.get("missing"), ContractError);
    std::stringstream bad("mhpm-checkpoint 9\nend\n");
    EXPECT_THROW(Checkpoint::read(bad), ContractError);
    std::stringstream truncated("mhpm-checkpoint 1\narray x 3\n1 2\n");
    EXPECT_THROW(Checkpoint::read(truncated), ContractError);
}
