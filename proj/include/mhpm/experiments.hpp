#pragma once

// Experiment drivers. Each takes a RunConfig, appends metrics rows, and fills
// a checkpoint with its final state. run_experiment wraps them with artifact
// writing for the command-line tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mhpm/checkpoint.hpp"
#include "mhpm/config.hpp"
#include "mhpm/metrics.hpp"

namespace mhpm {

struct ExperimentContext {
    const RunConfig& cfg;
    MetricsLog& metrics;
    Checkpoint& final_state;
    const Checkpoint* resume = nullptr;
    // Extra artifacts: (file name, contents).
    std::vector<std::pair<std::string, std::string>> files;
    std::string summary;
};

// --- charlm ---------------------------------------------------------------

struct CharLmResult {
    std::vector<std::uint64_t> fire_counts;  // per layer
    double unigram_baseline = 0.0;
    std::uint64_t locality_violations = 0;
    std::uint64_t locality_checks = 0;
};

CharLmResult run_charlm(ExperimentContext& ctx);

// --- saccade: babbling with the visual/motor merge graph, then tracking ------

struct BabbleResult {
    double visual_loss_late = 0.0;  // mean visual AR loss over the second half
    double visual_loss_early = 0.0;
};

// One babbling run; `feedback` toggles the merge node's top-down context.
BabbleResult run_babbling(const RunConfig& cfg, bool feedback, MetricsLog* metrics, const std::string& scope,
                          Checkpoint* final_state = nullptr);

struct TrackingResult {
    double err_first = 0.0;  // mean |target - gaze|^2, first 10% of ticks
    double err_last = 0.0;   // same, final 10%
};

TrackingResult run_tracking(const RunConfig& cfg, MetricsLog* metrics, Checkpoint* final_state);

void run_saccade(ExperimentContext& ctx);

// --- arbitration ----------------------------------------------------------

struct ArbitrationResult {
    double fixation_hold = 0.0;           // fraction of held-out fixation-task ticks within r_fov
    bool untrained_matches_reflex = false;
    bool reflex_unchanged = false;
    std::vector<std::pair<std::string, double>> mode_reward;  // mean reward per tick, per eval mode
};

ArbitrationResult run_arbitration(ExperimentContext& ctx);

// --- skinner --------------------------------------------------------------

struct SkinnerArm {
    std::size_t trials_to_criterion = 0;  // rewarded presses until P(correct) >= criterion
    bool reached = false;
    double correct_rate = 0.0;            // over all presses
};

SkinnerArm run_skinner_arm(const RunConfig& cfg, bool replay_on, MetricsLog* metrics, Checkpoint* final_state,
                           std::string* episode_csv);

void run_skinner(ExperimentContext& ctx);

// --- gradcheck ------------------------------------------------------------

struct GradcheckResult {
    double max_rel_error_ar = 0.0;
    double max_rel_error_ae = 0.0;
    std::size_t instances = 0;
};

GradcheckResult run_gradcheck(ExperimentContext& ctx);

// --- modulation memorization (library-level check, no CLI verb) -------------

struct MemorizationResult {
    double loss_rewarded = 0.0;
    double loss_unrewarded = 0.0;
};

MemorizationResult run_memorization(std::uint64_t seed);

// --- orchestration ----------------------------------------------------------

const std::vector<std::string>& experiment_names();

struct RunOptions {
    std::optional<std::filesystem::path> resume;
};

struct RunResult {
    std::filesystem::path out_dir;
    std::string summary;
};

// Resolves out_dir, runs, writes metrics.csv, config-echo.txt, checkpoint.txt
// and any extra artifacts. Errors propagate as ConfigError / ContractError /
// IoError.
RunResult run_experiment(const std::string& name, RunConfig cfg, const RunOptions& opts = {});

// Effective tick count for an experiment (resolves ticks = 0).
std::uint64_t effective_ticks(const std::string& name, const RunConfig& cfg);

}  // namespace mhpm
