#include "mhpm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mhpm/errors.hpp"

namespace mhpm {

namespace {

using VT = ValueType;

const std::vector<KeySpec> kSchema = {
    {"general", "seed", VT::Int, "1", "root seed; component streams derive from it"},
    {"general", "ticks", VT::Int, "0", "run length; 0 = experiment default (charlm 500000, saccade 20000)"},
    {"general", "out_dir", VT::String, "out", "artifact directory"},
    {"general", "log_every", VT::Int, "0", "metrics cadence in ticks; 0 = experiment default (charlm 100, others 1)"},
    {"general", "audit_locality", VT::Bool, "false", "count cross-unit parameter reads during updates"},

    {"graph", "L", VT::Int, "3", "charlm chain depth"},
    {"graph", "k", VT::Int, "4", "inputs per summary"},
    {"graph", "dims", VT::String, "16,16,16", "summary width per layer"},
    {"graph", "window", VT::Int, "0", "AR window; 0 = k"},
    {"graph", "hidden", VT::Int, "0", "hidden width of AR/AE maps; 0 = 2*max(in,out)"},
    {"graph", "base_lr", VT::Real, "0.05", "unit learning rate"},
    {"graph", "init_scale", VT::Real, "0.1", "uniform init half-width"},
    {"graph", "feedback", VT::Bool, "true", "top-down context on/off"},

    {"modulation", "alpha", VT::Real, "1", "trace to multiplier gain"},
    {"modulation", "tau", VT::Real, "25", "trace decay in ticks"},
    {"modulation", "m_min", VT::Real, "0", "multiplier floor"},
    {"modulation", "m_max", VT::Real, "5", "multiplier ceiling"},
    {"modulation", "intrinsic_gain", VT::Real, "0.1", "weight of prediction-improvement reward"},
    {"modulation", "err_smooth", VT::Real, "0.05", "EMA factor of the error baseline"},

    // charlm
    {"env", "corpus_path", VT::String, "", "text file; empty = synthetic corpus"},
    {"env", "corpus_size", VT::Int, "500000", "synthetic corpus length"},
    {"env", "distractors", VT::Int, "9", "rank-accuracy distractor count"},
    {"env", "history", VT::Int, "100", "distractor pool size per node"},
    // saccade world
    {"env", "r_fov", VT::Real, "0.05", "foveation radius"},
    {"env", "speed", VT::Real, "0.01", "target speed per tick"},
    {"env", "noise", VT::Real, "0.01", "retinal noise sd"},
    {"env", "max_step", VT::Real, "0.1", "max gaze displacement per tick"},
    // saccade: babbling phase
    {"env", "babble_ticks", VT::Int, "20000", "motor babbling length"},
    {"env", "sensor_k", VT::Int, "1", "k of the visual and motor leaves"},
    {"env", "merge_k", VT::Int, "4", "k of the merge node"},
    {"env", "merge_dim", VT::Int, "4", "merge node input and summary width"},
    // saccade: tracking phase
    {"env", "policy_hidden", VT::Int, "8", "tracking learner hidden width"},
    {"env", "policy_lr", VT::Real, "0.05", "tracking learner base rate"},
    {"env", "explore_sd", VT::Real, "0.05", "tracking exploration sd"},
    {"env", "delay", VT::Int, "5", "tracking eligibility delay in ticks"},
    // arbitration
    {"env", "train_episodes", VT::Int, "1000", "training episodes"},
    {"env", "eval_episodes", VT::Int, "5", "held-out episodes per mode"},
    {"env", "episode_ticks", VT::Int, "100", "ticks per episode"},
    {"env", "fixation_ticks", VT::Int, "40", "OVERLAP/GAP fixation duration"},
    {"env", "gap_ticks", VT::Int, "10", "GAP blank interval"},
    {"env", "train_modes", VT::String, "fixation", "modes cycled during training"},
    {"env", "eval_modes", VT::String, "pro,fixation,overlap,gap,anti", "modes evaluated after training"},
    {"env", "epsilon", VT::Real, "1", "arbitrator exploration during training"},
    {"env", "arb_lr", VT::Real, "0.1", "arbitrator preference rate"},
    {"env", "arb_hidden", VT::Int, "16", "learned proposal hidden width"},
    {"env", "arb_policy_lr", VT::Real, "0.05", "learned proposal base rate"},
    {"env", "arb_explore_sd", VT::Real, "0.1", "learned proposal exploration sd"},
    {"env", "arb_delay", VT::Int, "3", "learned proposal eligibility delay"},
    // skinner
    {"env", "max_trials", VT::Int, "30", "presses per run (M)"},
    {"env", "wait_ticks", VT::Int, "8", "wait steps after each press"},
    {"env", "episode_window", VT::Int, "8", "steps kept before/after a salient event (W)"},
    {"env", "capacity", VT::Int, "32", "episode buffer capacity"},
    {"env", "salience_threshold", VT::Real, "0.5", "|reward| that opens an episode"},
    {"env", "n_passes", VT::Int, "3", "replay passes between trials"},
    {"env", "replay_boost", VT::Real, "1", "replay rate multiplier"},
    {"env", "skinner_lr", VT::Real, "0.05", "button-value learner base rate"},
    {"env", "temperature", VT::Real, "0.2", "softmax temperature of button choice"},
    {"env", "criterion", VT::Real, "0.9", "P(correct) that counts as acquired"},
    // gradcheck
    {"env", "instances", VT::Int, "20", "random instances per check"},
    {"env", "max_dim", VT::Int, "8", "largest dimension drawn"},
    {"env", "fd_step", VT::Real, "1e-5", "central difference step"},
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool parse_int(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    const char* b = s.data();
    if (*b == '+') ++b;
    const auto r = std::from_chars(b, s.data() + s.size(), out);
    return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

bool parse_real(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* b = s.data();
    if (*b == '+') ++b;
    const auto r = std::from_chars(b, s.data() + s.size(), out);
    return r.ec == std::errc{} && r.ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_bool(const std::string& s, bool& out) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return out = true, true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return out = false, true;
    return false;
}

bool type_ok(ValueType t, const std::string& v) {
    std::int64_t i;
    double d;
    bool b;
    switch (t) {
        case VT::Int: return parse_int(v, i);
        case VT::Real: return parse_real(v, d);
        case VT::Bool: return parse_bool(v, b);
        case VT::String: return v.find('\n') == std::string::npos;
    }
    return false;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

const std::vector<KeySpec>& config_schema() { return kSchema; }

const char* to_string(ValueType t) {
    switch (t) {
        case VT::Int: return "integer";
        case VT::Real: return "real";
        case VT::Bool: return "boolean";
        case VT::String: return "string";
    }
    return "?";
}

RunConfig::RunConfig() {
    for (const auto& k : kSchema) values_[{k.section, k.key}] = k.default_value;
}

const KeySpec& RunConfig::spec(const std::string& section, const std::string& key) const {
    for (const auto& k : kSchema)
        if (section == k.section && key == k.key) return k;
    bool known_section = std::any_of(kSchema.begin(), kSchema.end(), [&](const KeySpec& k) { return section == k.section; });
    if (!known_section) throw ConfigError("unknown section [" + section + "]");
    throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    const KeySpec& s = spec(section, key);
    if (!type_ok(s.type, value))
        throw ConfigError("key '" + key + "' expects " + to_string(s.type) + ", got '" + value + "'");
    values_[{section, key}] = value;
    set_[{section, key}] = true;
}

bool RunConfig::explicitly_set(const std::string& section, const std::string& key) const {
    spec(section, key);
    return set_.count({section, key}) > 0;
}

RunConfig RunConfig::parse(std::string_view text) {
    RunConfig cfg;
    std::string section;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line_view = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        std::string line = trim(line_view);
        const auto where = [&] { return "line " + std::to_string(lineno) + ": "; };
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) throw ConfigError(where() + "malformed section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (std::none_of(kSchema.begin(), kSchema.end(), [&](const KeySpec& k) { return section == k.section; }))
                throw ConfigError(where() + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where() + "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError(where() + "missing key");
        if (section.empty()) throw ConfigError(where() + "key '" + key + "' outside any section");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        try {
            cfg.set(section, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where() + e.what());
        }
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

const std::string& RunConfig::raw(const std::string& section, const std::string& key, ValueType want) const {
    const KeySpec& s = spec(section, key);
    require(s.type == want, "config key '" + key + "' is " + to_string(s.type) + ", read as " + to_string(want));
    return values_.at({section, key});
}

std::int64_t RunConfig::get_int(const std::string& section, const std::string& key) const {
    std::int64_t v = 0;
    parse_int(raw(section, key, VT::Int), v);
    return v;
}

double RunConfig::get_real(const std::string& section, const std::string& key) const {
    double v = 0.0;
    parse_real(raw(section, key, VT::Real), v);
    return v;
}

bool RunConfig::get_bool(const std::string& section, const std::string& key) const {
    bool v = false;
    parse_bool(raw(section, key, VT::Bool), v);
    return v;
}

const std::string& RunConfig::get_string(const std::string& section, const std::string& key) const {
    return raw(section, key, VT::String);
}

std::vector<std::int64_t> RunConfig::get_int_list(const std::string& section, const std::string& key) const {
    std::vector<std::int64_t> out;
    for (const auto& item : split_list(get_string(section, key))) {
        std::int64_t v;
        if (!parse_int(item, v)) throw ConfigError("key '" + key + "' expects a list of integers, got '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> RunConfig::get_list(const std::string& section, const std::string& key) const {
    return split_list(get_string(section, key));
}

std::string RunConfig::echo() const {
    std::string out;
    std::string section;
    for (const auto& k : kSchema) {
        if (section != k.section) {
            if (!section.empty()) out += '\n';
            section = k.section;
            out += "[" + section + "]\n";
        }
        out += std::string(k.key) + " = " + values_.at({k.section, k.key}) + "\n";
    }
    return out;
}

}  // namespace mhpm
