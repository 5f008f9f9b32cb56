#include "mhpm/envs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mhpm/errors.hpp"

namespace mhpm {

// ---------------------------------------------------------------------------
// Character stream

CharStreamEnv::CharStreamEnv(std::string corpus) : corpus_(std::move(corpus)) {
    require(!corpus_.empty(), "CharStreamEnv: empty corpus");
    std::array<bool, 256> seen{};
    for (unsigned char c : corpus_) seen[c] = true;
    for (int c = 0; c < 256; ++c)
        if (seen[c]) alphabet_.push_back(static_cast<unsigned char>(c));
    build_lookup();
}

CharStreamEnv::CharStreamEnv(std::string corpus, std::vector<unsigned char> alphabet)
    : corpus_(std::move(corpus)), alphabet_(std::move(alphabet)) {
    require(!corpus_.empty(), "CharStreamEnv: empty corpus");
    std::array<bool, 256> seen{};
    for (unsigned char c : alphabet_) {
        require(!seen[c], "CharStreamEnv: duplicate alphabet symbol");
        seen[c] = true;
    }
    build_lookup();
}

void CharStreamEnv::build_lookup() {
    lookup_.fill(alphabet_.size());
    for (std::size_t i = 0; i < alphabet_.size(); ++i) lookup_[alphabet_[i]] = i;
}

CharStreamEnv::Sample CharStreamEnv::next() {
    const std::size_t sym = lookup_[static_cast<unsigned char>(corpus_[cursor_])];
    cursor_ = (cursor_ + 1) % corpus_.size();
    return {SignalVector::one_hot(dim(), sym), sym};
}

void CharStreamEnv::set_cursor(std::size_t c) {
    require(c < corpus_.size(), "CharStreamEnv::set_cursor: out of range");
    cursor_ = c;
}

std::pair<std::size_t, double> CharStreamEnv::unigram_mode() const {
    std::vector<std::size_t> counts(dim(), 0);
    for (unsigned char c : corpus_) ++counts[lookup_[c]];
    const auto it = std::max_element(counts.begin(), counts.end());
    return {static_cast<std::size_t>(it - counts.begin()),
            static_cast<double>(*it) / static_cast<double>(corpus_.size())};
}

std::string synthetic_corpus(std::size_t length, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "corpus"));
    constexpr std::size_t kWords = 200, kSucc = 4;
    std::vector<std::string> words(kWords);
    for (auto& w : words) {
        const std::size_t len = 2 + rng.below(7);
        for (std::size_t i = 0; i < len; ++i) w.push_back(static_cast<char>('a' + rng.below(26)));
    }
    // Zipf weights over the vocabulary.
    std::vector<double> cdf(kWords);
    double acc = 0.0;
    for (std::size_t i = 0; i < kWords; ++i) cdf[i] = acc += 1.0 / static_cast<double>(i + 1);
    auto zipf = [&] {
        const double u = rng.uniform() * acc;
        return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    };
    std::vector<std::array<std::size_t, kSucc>> succ(kWords);
    for (auto& s : succ)
        for (auto& x : s) x = zipf();

    std::string out;
    out.reserve(length + 16);
    std::size_t w = zipf(), in_sentence = 0;
    while (out.size() < length) {
        out += words[w];
        ++in_sentence;
        if (in_sentence >= 4 && rng.bernoulli(0.15)) {
            out += rng.bernoulli(0.2) ? ".\n" : ". ";
            in_sentence = 0;
        } else {
            out += ' ';
        }
        w = rng.bernoulli(0.75) ? succ[w][rng.below(kSucc)] : zipf();
    }
    out.resize(length);
    return out;
}

std::string load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path.string());
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("error reading corpus file: " + path.string());
    require(!s.empty(), "corpus file is empty: " + path.string());
    return s;
}

// ---------------------------------------------------------------------------
// Rank accuracy

int rank_accuracy(const SignalVector& prediction, const SignalVector& target,
                  std::span<const SignalVector> distractors) {
    require(!distractors.empty(), "rank_accuracy: need at least one distractor");
    require_dim(target.dim(), prediction.dim(), "rank_accuracy prediction");
    const double dt = prediction.squared_distance(target);
    for (const auto& d : distractors) {
        require_dim(target.dim(), d.dim(), "rank_accuracy distractor");
        if (prediction.squared_distance(d) <= dt) return 0;
    }
    return 1;
}

void DistractorPool::push(const SignalVector& v) {
    items_.push_back(v);
    if (items_.size() > capacity_) items_.pop_front();
}

std::vector<SignalVector> DistractorPool::sample(const SignalVector& target, std::size_t n, Rng& rng) const {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < items_.size(); ++i)
        if (!(items_[i] == target)) eligible.push_back(i);
    std::vector<SignalVector> out;
    if (eligible.empty()) return out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(items_[eligible[rng.below(eligible.size())]]);
    return out;
}

// ---------------------------------------------------------------------------
// Saccade world

const char* to_string(TaskMode m) {
    switch (m) {
        case TaskMode::Pro: return "pro";
        case TaskMode::Fixation: return "fixation";
        case TaskMode::Overlap: return "overlap";
        case TaskMode::Gap: return "gap";
        case TaskMode::Anti: return "anti";
    }
    return "?";
}

std::optional<TaskMode> parse_task_mode(std::string_view s) {
    for (TaskMode m : {TaskMode::Pro, TaskMode::Fixation, TaskMode::Overlap, TaskMode::Gap, TaskMode::Anti})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

const char* to_string(FixationColor c) {
    switch (c) {
        case FixationColor::None: return "none";
        case FixationColor::Red: return "red";
        case FixationColor::Green: return "green";
    }
    return "?";
}

double distance(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

SaccadeEnv::SaccadeEnv(const SaccadeConfig& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
    require(cfg.r_fov > 0.0 && cfg.speed >= 0.0 && cfg.noise >= 0.0 && cfg.max_step > 0.0,
            "SaccadeEnv: r_fov > 0, speed >= 0, noise >= 0, max_step > 0");
    reset();
}

bool SaccadeEnv::fixation_on(std::size_t t) const {
    switch (cfg_.mode) {
        case TaskMode::Pro: return false;
        case TaskMode::Fixation:
        case TaskMode::Anti: return true;
        case TaskMode::Overlap:
        case TaskMode::Gap: return t < cfg_.fixation_ticks;
    }
    return false;
}

bool SaccadeEnv::target_visible(std::size_t t) const {
    if (cfg_.mode != TaskMode::Gap) return true;
    return t < cfg_.fixation_ticks || t >= cfg_.fixation_ticks + cfg_.gap_ticks;
}

std::optional<std::array<double, 2>> SaccadeEnv::rewarded_location(std::size_t t) const {
    switch (cfg_.mode) {
        case TaskMode::Pro: return target_;
        case TaskMode::Fixation: return fixation_;
        case TaskMode::Overlap:
        case TaskMode::Gap:
            if (fixation_on(t)) return fixation_;
            if (target_visible(t)) return target_;
            return std::nullopt;
        case TaskMode::Anti:
            return std::array<double, 2>{std::clamp(2.0 * fixation_[0] - target_[0], 0.0, 1.0),
                                         std::clamp(2.0 * fixation_[1] - target_[1], 0.0, 1.0)};
    }
    return std::nullopt;
}

SaccadeObservation SaccadeEnv::reset() {
    t_ = 0;
    for (int i = 0; i < 2; ++i) {
        target_[i] = rng_.uniform();
        waypoint_[i] = rng_.uniform();
    }
    if (cfg_.mode == TaskMode::Pro) {
        for (int i = 0; i < 2; ++i) gaze_[i] = rng_.uniform(0.1, 0.9);
        fixation_ = {0.5, 0.5};
    } else {
        for (int i = 0; i < 2; ++i) fixation_[i] = rng_.uniform(0.3, 0.7);
        gaze_ = fixation_;
    }
    obs_ = observe();
    return obs_;
}

void SaccadeEnv::set_state(const std::array<double, 2>& gaze, const std::array<double, 2>& target,
                           const std::array<double, 2>& fixation) {
    for (const auto* p : {&gaze, &target, &fixation})
        for (double x : *p) require(x >= 0.0 && x <= 1.0, "SaccadeEnv::set_state: coordinates must lie in [0, 1]");
    gaze_ = gaze;
    target_ = target;
    fixation_ = fixation;
    obs_ = observe();
}

SaccadeObservation SaccadeEnv::observe() {
    SaccadeObservation o;
    auto noisy = [&](const std::array<double, 2>& p) {
        std::vector<double> v(2);
        for (int i = 0; i < 2; ++i) v[i] = std::clamp(p[i] - gaze_[i] + cfg_.noise * rng_.normal(), -1.0, 1.0);
        return SignalVector(std::move(v));
    };
    o.salient_motion = target_visible(t_);
    o.retinal_offset = o.salient_motion ? noisy(target_) : SignalVector::zeros(2);
    o.fixation_on = fixation_on(t_);
    o.fixation_pos = o.fixation_on ? noisy(fixation_) : SignalVector::zeros(2);
    o.fixation_color = !o.fixation_on ? FixationColor::None
                       : cfg_.mode == TaskMode::Anti ? FixationColor::Green
                                                     : FixationColor::Red;
    return o;
}

SaccadeStep SaccadeEnv::step(const SignalVector& dgaze) {
    require_dim(2, dgaze.dim(), "SaccadeEnv::step");
    for (int i = 0; i < 2; ++i)
        require(std::abs(dgaze[i]) <= cfg_.max_step * (1.0 + 1e-12), "SaccadeEnv::step: |dgaze| exceeds max_step");
    for (int i = 0; i < 2; ++i) gaze_[i] = std::clamp(gaze_[i] + dgaze[i], 0.0, 1.0);

    const double dx = waypoint_[0] - target_[0], dy = waypoint_[1] - target_[1];
    const double n = std::hypot(dx, dy);
    if (n <= cfg_.speed) {
        target_ = waypoint_;
        for (int i = 0; i < 2; ++i) waypoint_[i] = rng_.uniform();
    } else {
        target_[0] += dx / n * cfg_.speed;
        target_[1] += dy / n * cfg_.speed;
    }

    SaccadeStep s;
    if (auto loc = rewarded_location(t_)) s.reward = distance(*loc, gaze_) <= cfg_.r_fov ? 1.0 : 0.0;
    ++t_;
    s.done = cfg_.episode_ticks > 0 && t_ >= cfg_.episode_ticks;
    obs_ = observe();
    s.observation = obs_;
    return s;
}

// ---------------------------------------------------------------------------
// Skinner box

SkinnerBoxEnv::SkinnerBoxEnv(std::size_t max_trials, std::uint64_t seed) : max_trials_(max_trials) {
    require(max_trials > 0, "SkinnerBoxEnv: max_trials must be positive");
    Rng rng(seed);
    good_ = rng.bernoulli(0.5) ? SkinnerAction::PressBlue : SkinnerAction::PressRed;
}

SkinnerStep SkinnerBoxEnv::step(SkinnerAction a) {
    require(!done(), "SkinnerBoxEnv::step: episode is done");
    SkinnerStep s;
    s.observation = observation();
    if (a != SkinnerAction::Wait) {
        s.reward = a == good_ ? 1.0 : -1.0;
        ++trials_;
    }
    s.done = done();
    return s;
}

}  // namespace mhpm
