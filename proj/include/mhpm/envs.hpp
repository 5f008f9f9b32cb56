#pragma once

// Desk-scale environments: a character stream, a 2D saccade world and a
// two-button Skinner box, plus the rank-accuracy metric.

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mhpm/rng.hpp"
#include "mhpm/signal.hpp"

namespace mhpm {

// ---------------------------------------------------------------------------
// Character stream

class CharStreamEnv {
public:
    struct Sample {
        SignalVector one_hot;
        std::size_t symbol;  // alphabet index, or unk_index()
    };

    // Alphabet = distinct bytes of the corpus in ascending byte order.
    explicit CharStreamEnv(std::string corpus);
    // Explicit alphabet; corpus bytes outside it map to UNK.
    CharStreamEnv(std::string corpus, std::vector<unsigned char> alphabet);

    Sample next();

    std::size_t dim() const { return alphabet_.size() + 1; }
    std::size_t unk_index() const { return alphabet_.size(); }
    std::size_t index_of(unsigned char c) const { return lookup_[c]; }
    const std::vector<unsigned char>& alphabet() const { return alphabet_; }
    const std::string& corpus() const { return corpus_; }
    std::size_t cursor() const { return cursor_; }
    void set_cursor(std::size_t c);

    // Index of the most frequent symbol and its relative frequency.
    std::pair<std::size_t, double> unigram_mode() const;

private:
    void build_lookup();

    std::string corpus_;
    std::vector<unsigned char> alphabet_;
    std::array<std::size_t, 256> lookup_{};
    std::size_t cursor_ = 0;
};

// Seeded word-level Markov text over a-z, space, '.', newline.
std::string synthetic_corpus(std::size_t length, std::uint64_t seed);
// Raw bytes of a file; IoError when unreadable, ContractError when empty.
std::string load_corpus(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Rank accuracy

// 1 when target is strictly nearest to prediction among {target} and the
// distractors; ties score 0.
int rank_accuracy(const SignalVector& prediction, const SignalVector& target,
                  std::span<const SignalVector> distractors);

// Last `capacity` observed inputs of one node, for drawing distractors.
class DistractorPool {
public:
    explicit DistractorPool(std::size_t capacity = 100) : capacity_(capacity) {}

    void push(const SignalVector& v);
    // n draws with replacement among stored entries that differ from target;
    // empty when there are none.
    std::vector<SignalVector> sample(const SignalVector& target, std::size_t n, Rng& rng) const;

    std::size_t size() const { return items_.size(); }
    const std::deque<SignalVector>& items() const { return items_; }
    void clear() { items_.clear(); }

private:
    std::size_t capacity_;
    std::deque<SignalVector> items_;
};

// ---------------------------------------------------------------------------
// Saccade world

enum class TaskMode { Pro, Fixation, Overlap, Gap, Anti };
enum class FixationColor { None, Red, Green };

const char* to_string(TaskMode m);
std::optional<TaskMode> parse_task_mode(std::string_view s);
const char* to_string(FixationColor c);

struct SaccadeObservation {
    SignalVector retinal_offset;  // target - gaze + noise; zeros when not visible
    bool salient_motion = false;  // target visible
    SignalVector fixation_pos;    // fixation - gaze + noise; zeros when off
    bool fixation_on = false;
    FixationColor fixation_color = FixationColor::None;
};

struct SaccadeConfig {
    TaskMode mode = TaskMode::Pro;
    double r_fov = 0.05;
    double speed = 0.01;
    double noise = 0.01;
    double max_step = 0.1;
    std::size_t episode_ticks = 100;  // 0 = one endless episode
    std::size_t fixation_ticks = 40;  // OVERLAP/GAP: fixation shown for t < this
    std::size_t gap_ticks = 10;       // GAP: target hidden for this long after fixation offset
};

struct SaccadeStep {
    SaccadeObservation observation;
    double reward = 0.0;
    bool done = false;
};

// Gaze, target and fixation live in [0,1]^2. The target follows a
// random-waypoint walk at `speed` per tick. In the non-PRO modes an episode
// starts with the gaze on the fixation point.
class SaccadeEnv {
public:
    SaccadeEnv(const SaccadeConfig& cfg, std::uint64_t seed);

    const SaccadeConfig& config() const { return cfg_; }
    void set_mode(TaskMode m) { cfg_.mode = m; }

    // New episode; returns its first observation.
    SaccadeObservation reset();
    // Apply dgaze (||dgaze||_inf <= max_step), advance the target, score.
    SaccadeStep step(const SignalVector& dgaze);

    // Place gaze, target and fixation directly (tests, scripted scenes); the
    // current observation is regenerated.
    void set_state(const std::array<double, 2>& gaze, const std::array<double, 2>& target,
                   const std::array<double, 2>& fixation);

    const SaccadeObservation& observation() const { return obs_; }
    std::array<double, 2> gaze() const { return gaze_; }
    std::array<double, 2> target() const { return target_; }
    std::array<double, 2> fixation() const { return fixation_; }
    std::size_t episode_tick() const { return t_; }

    // Schedule flags at episode tick t.
    bool fixation_on(std::size_t t) const;
    bool target_visible(std::size_t t) const;
    // Location that pays at episode tick t, if any.
    std::optional<std::array<double, 2>> rewarded_location(std::size_t t) const;

private:
    SaccadeObservation observe();

    SaccadeConfig cfg_;
    Rng rng_;
    std::array<double, 2> gaze_{0.5, 0.5}, target_{0.5, 0.5}, waypoint_{0.5, 0.5}, fixation_{0.5, 0.5};
    std::size_t t_ = 0;
    SaccadeObservation obs_;
};

double distance(const std::array<double, 2>& a, const std::array<double, 2>& b);

// ---------------------------------------------------------------------------
// Skinner box

enum class SkinnerAction { Wait, PressBlue, PressRed };

struct SkinnerStep {
    SignalVector observation;
    double reward = 0.0;
    bool done = false;
};

class SkinnerBoxEnv {
public:
    SkinnerBoxEnv(std::size_t max_trials, std::uint64_t seed);

    SkinnerStep step(SkinnerAction a);

    // Constant observation: both buttons lit.
    SignalVector observation() const { return SignalVector{1.0, 1.0}; }
    SkinnerAction good_button() const { return good_; }
    std::size_t trials() const { return trials_; }
    std::size_t max_trials() const { return max_trials_; }
    bool done() const { return trials_ >= max_trials_; }

private:
    std::size_t max_trials_;
    SkinnerAction good_;
    std::size_t trials_ = 0;
};

}  // namespace mhpm
