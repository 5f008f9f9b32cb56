#include <gtest/gtest.h>

#include <cmath>

#include "mhpm/envs.hpp"
#include "mhpm/errors.hpp"
#include "mhpm/rng.hpp"

using namespace mhpm;

TEST(CharStream, AlternatingPair) {
    CharStreamEnv env("ab");
    ASSERT_EQ(env.dim(), 3u);
    for (int i = 0; i < 6; ++i) {
        const auto s = env.next();
        EXPECT_EQ(s.symbol, static_cast<std::size_t>(i % 2));
        EXPECT_EQ(s.one_hot, SignalVector::one_hot(3, i % 2));
    }
}

TEST(CharStream, AlphabetFromCorpus) {
    CharStreamEnv env("aab");
    ASSERT_EQ(env.alphabet(), (std::vector<unsigned char>{'a', 'b'}));
    EXPECT_EQ(env.dim(), 3u);
    EXPECT_EQ(env.unk_index(), 2u);
    CharStreamEnv sorted("cab");
    EXPECT_EQ(sorted.alphabet(), (std::vector<unsigned char>{'a', 'b', 'c'}));
}

TEST(CharStream, WrapsAtEnd) {
    CharStreamEnv env("xyz");
    env.set_cursor(2);
    EXPECT_EQ(env.next().symbol, env.index_of('z'));
    EXPECT_EQ(env.cursor(), 0u);
    EXPECT_EQ(env.next().symbol, env.index_of('x'));
}

TEST(CharStream, UnknownSymbolsMapToUnk) {
    CharStreamEnv env("abc", {'a', 'b'});
    env.next();
    env.next();
    const auto s = env.next();
    EXPECT_EQ(s.symbol, env.unk_index());
    EXPECT_EQ(s.one_hot[2], 1.0);
}

TEST(CharStream, Errors) {
    EXPECT_THROW(CharStreamEnv(""), ContractError);
    EXPECT_THROW(CharStreamEnv("ab", {'a', 'a'}), ContractError);
    CharStreamEnv env("ab");
    EXPECT_THROW(env.set_cursor(2), ContractError);
}

TEST(CharStream, CursorVisitsTModC) {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t c = 1 + rng.below(40);
        std::string corpus;
        for (std::size_t i = 0; i < c; ++i) corpus.push_back(static_cast<char>('a' + rng.below(5)));
        CharStreamEnv env(corpus);
        const std::size_t T = rng.below(200);
        for (std::size_t t = 0; t < T; ++t) {
            ASSERT_EQ(env.cursor(), t % c);
            ASSERT_EQ(env.next().symbol, env.index_of(static_cast<unsigned char>(corpus[t % c])));
        }
    }
}

TEST(CharStream, UnigramMode) {
    CharStreamEnv env("abbbc");
    const auto [idx, freq] = env.unigram_mode();
    EXPECT_EQ(idx, env.index_of('b'));
    EXPECT_DOUBLE_EQ(freq, 0.6);
}

TEST(SyntheticCorpus, DeterministicAndPlainText) {
    const std::string a = synthetic_corpus(5000, 7), b = synthetic_corpus(5000, 7), c = synthetic_corpus(5000, 8);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_EQ(a.size(), 5000u);
    for (char ch : a) EXPECT_TRUE((ch >= 'a' && ch <= 'z') || ch == ' ' || ch == '.' || ch == '\n') << int(ch);
}

TEST(LoadCorpus, MissingFileIsIoError) {
    EXPECT_THROW(load_corpus("/nonexistent/corpus.txt"), IoError);
}

TEST(RankAccuracy, ExactPredictionScoresOne) {
    const SignalVector t{0.3, -0.2};
    const std::vector<SignalVector> d = {{1.0, 1.0}, {0.3, -0.1}, {-5.0, 0.0}};
    EXPECT_EQ(rank_accuracy(t, t, d), 1);
}

TEST(RankAccuracy, TieScoresZero) {
    const SignalVector p{0.0, 0.0}, t{1.0, 0.0};
    const std::vector<SignalVector> d = {{-1.0, 0.0}};
    EXPECT_EQ(rank_accuracy(p, t, d), 0);
}

TEST(RankAccuracy, Errors) {
    const SignalVector p{0.0, 0.0}, t{1.0, 0.0};
    EXPECT_THROW(rank_accuracy(p, t, {}), ContractError);
    const std::vector<SignalVector> bad = {{1.0}};
    EXPECT_THROW(rank_accuracy(p, t, bad), ContractError);
    EXPECT_THROW(rank_accuracy(SignalVector{1.0}, t, std::vector<SignalVector>{{1.0, 0.0}}), ContractError);
}

TEST(RankAccuracy, RandomPredictionsAtChance) {
    // With N = 9 exchangeable candidates the chance of the target being
    // nearest is 1 / 10.
    Rng rng(11);
    auto draw = [&] { return SignalVector{rng.uniform(), rng.uniform(), rng.uniform()}; };
    int hits = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const SignalVector t = draw();
        std::vector<SignalVector> d;
        for (int j = 0; j < 9; ++j) d.push_back(draw());
        hits += rank_accuracy(draw(), t, d);
    }
    EXPECT_NEAR(hits / static_cast<double>(trials), 0.1, 0.02);
}

TEST(DistractorPool, CapacityAndExclusion) {
    DistractorPool pool(3);
    for (double x : {1.0, 2.0, 3.0, 4.0}) pool.push(SignalVector{x});
    EXPECT_EQ(pool.size(), 3u);
    EXPECT_EQ(pool.items().front(), SignalVector{2.0});
    Rng rng(1);
    const auto d = pool.sample(SignalVector{3.0}, 50, rng);
    ASSERT_EQ(d.size(), 50u);
    for (const auto& v : d) EXPECT_NE(v, SignalVector{3.0});
    DistractorPool same(5);
    same.push(SignalVector{1.0});
    EXPECT_TRUE(same.sample(SignalVector{1.0}, 9, rng).empty());
}

namespace {

SaccadeConfig world(TaskMode m) {
    SaccadeConfig c;
    c.mode = m;
    return c;
}

}  // namespace

TEST(Saccade, ProRewardWhenOnTarget) {
    SaccadeConfig c = world(TaskMode::Pro);
    c.speed = 0.0;
    SaccadeEnv env(c, 1);
    env.set_state({0.4, 0.4}, {0.4, 0.4}, {0.5, 0.5});
    EXPECT_EQ(env.step(SignalVector{0.0, 0.0}).reward, 1.0);
    env.set_state({0.1, 0.1}, {0.4, 0.4}, {0.5, 0.5});
    EXPECT_EQ(env.step(SignalVector{0.0, 0.0}).reward, 0.0);
}

TEST(Saccade, FixationRewardWithDistractorMoving) {
    SaccadeEnv env(world(TaskMode::Fixation), 2);
    EXPECT_EQ(env.gaze(), env.fixation());
    const auto target0 = env.target();
    const auto s = env.step(SignalVector{0.0, 0.0});
    EXPECT_EQ(s.reward, 1.0);
    EXPECT_NE(env.target(), target0);
    EXPECT_TRUE(s.observation.fixation_on);
    EXPECT_EQ(s.observation.fixation_color, FixationColor::Red);
}

TEST(Saccade, GazeClampsToScreen) {
    SaccadeEnv env(world(TaskMode::Pro), 3);
    env.set_state({0.99, 0.5}, {0.2, 0.2}, {0.5, 0.5});
    env.step(SignalVector{0.1, 0.0});
    EXPECT_EQ(env.gaze()[0], 1.0);
    EXPECT_EQ(env.gaze()[1], 0.5);
}

TEST(Saccade, ActionBoundEnforced) {
    SaccadeEnv env(world(TaskMode::Pro), 3);
    EXPECT_THROW(env.step(SignalVector{0.2, 0.0}), ContractError);
    EXPECT_THROW(env.step(SignalVector{0.0}), ContractError);
}

TEST(Saccade, PhysicsInvariants) {
    for (TaskMode m : {TaskMode::Pro, TaskMode::Fixation, TaskMode::Overlap, TaskMode::Gap, TaskMode::Anti}) {
        SaccadeEnv env(world(m), 9);
        Rng rng(5);
        for (int t = 0; t < 2000; ++t) {
            const auto before = env.target();
            const auto s = env.step(SignalVector{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)});
            for (int i = 0; i < 2; ++i) {
                ASSERT_GE(env.gaze()[i], 0.0);
                ASSERT_LE(env.gaze()[i], 1.0);
                ASSERT_GE(env.target()[i], 0.0);
                ASSERT_LE(env.target()[i], 1.0);
                ASSERT_LE(std::abs(s.observation.retinal_offset[i]), 1.0);
                ASSERT_LE(std::abs(s.observation.fixation_pos[i]), 1.0);
            }
            if (!s.done) ASSERT_LE(distance(before, env.target()), env.config().speed + 1e-12);
            if (s.done) env.reset();
        }
    }
}

TEST(Saccade, GapAndOverlapSchedules) {
    SaccadeEnv gap(world(TaskMode::Gap), 1);
    EXPECT_TRUE(gap.fixation_on(39));
    EXPECT_FALSE(gap.fixation_on(40));
    EXPECT_TRUE(gap.target_visible(39));
    EXPECT_FALSE(gap.target_visible(40));
    EXPECT_FALSE(gap.target_visible(49));
    EXPECT_TRUE(gap.target_visible(50));
    EXPECT_FALSE(gap.rewarded_location(45).has_value());
    SaccadeEnv overlap(world(TaskMode::Overlap), 1);
    EXPECT_EQ(*overlap.rewarded_location(10), overlap.fixation());
    EXPECT_EQ(*overlap.rewarded_location(60), overlap.target());
    EXPECT_TRUE(overlap.target_visible(45));
}

TEST(Saccade, GapHidesTargetFromObservation) {
    SaccadeEnv env(world(TaskMode::Gap), 4);
    for (int t = 0; t < 45; ++t) env.step(SignalVector{0.0, 0.0});
    EXPECT_FALSE(env.observation().salient_motion);
    EXPECT_EQ(env.observation().retinal_offset, SignalVector::zeros(2));
    EXPECT_FALSE(env.observation().fixation_on);
}

TEST(Saccade, AntiRewardsReflectedPoint) {
    SaccadeConfig c = world(TaskMode::Anti);
    c.speed = 0.0;
    SaccadeEnv env(c, 5);
    env.set_state({0.4, 0.5}, {0.6, 0.5}, {0.5, 0.5});
    EXPECT_EQ(env.observation().fixation_color, FixationColor::Green);
    EXPECT_EQ(env.step(SignalVector{0.0, 0.0}).reward, 1.0);
    env.set_state({0.6, 0.5}, {0.6, 0.5}, {0.5, 0.5});
    EXPECT_EQ(env.step(SignalVector{0.0, 0.0}).reward, 0.0);
}

TEST(Saccade, EpisodeLengthAndDeterminism) {
    SaccadeEnv a(world(TaskMode::Overlap), 42), b(world(TaskMode::Overlap), 42);
    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
        const SignalVector act{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
        const auto sa = a.step(act), sb = b.step(act);
        ASSERT_EQ(sa.reward, sb.reward);
        ASSERT_EQ(sa.observation.retinal_offset, sb.observation.retinal_offset);
        ASSERT_EQ(sa.done, t == 99);
    }
}

TEST(Saccade, ModeNames) {
    for (TaskMode m : {TaskMode::Pro, TaskMode::Fixation, TaskMode::Overlap, TaskMode::Gap, TaskMode::Anti})
        EXPECT_EQ(parse_task_mode(to_string(m)), m);
    EXPECT_FALSE(parse_task_mode("saccade").has_value());
}

TEST(Skinner, RewardsAndCounter) {
    SkinnerBoxEnv env(3, 17);
    const SkinnerAction good = env.good_button();
    const SkinnerAction bad = good == SkinnerAction::PressBlue ? SkinnerAction::PressRed : SkinnerAction::PressBlue;
    EXPECT_EQ(env.step(SkinnerAction::Wait).reward, 0.0);
    EXPECT_EQ(env.trials(), 0u);
    EXPECT_EQ(env.step(good).reward, 1.0);
    EXPECT_EQ(env.step(bad).reward, -1.0);
    const auto last = env.step(good);
    EXPECT_TRUE(last.done);
    EXPECT_THROW(env.step(SkinnerAction::Wait), ContractError);
}

TEST(Skinner, MappingFixedBySeed) {
    int blue = 0;
    for (std::uint64_t s = 0; s < 64; ++s) {
        SkinnerBoxEnv a(5, s), b(5, s);
        EXPECT_EQ(a.good_button(), b.good_button());
        for (auto act : {SkinnerAction::PressBlue, SkinnerAction::Wait, SkinnerAction::PressRed})
            EXPECT_EQ(a.step(act).reward, b.step(act).reward);
        blue += a.good_button() == SkinnerAction::PressBlue;
    }
    EXPECT_GT(blue, 0);
    EXPECT_LT(blue, 64);
}
