#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>

#include "mhpm/errors.hpp"
#include "mhpm/experiments.hpp"
#include "experiment_util.hpp"

namespace mhpm {

std::size_t positive(const RunConfig& cfg, const std::string& section, const std::string& key) {
    const auto v = cfg.get_int(section, key);
    if (v <= 0) throw ConfigError("[" + section + "] " + key + " must be positive, got " + std::to_string(v));
    return static_cast<std::size_t>(v);
}

std::size_t nonnegative(const RunConfig& cfg, const std::string& section, const std::string& key) {
    const auto v = cfg.get_int(section, key);
    if (v < 0) throw ConfigError("[" + section + "] " + key + " must be nonnegative, got " + std::to_string(v));
    return static_cast<std::size_t>(v);
}

ModulatorConfig modulator_config(const RunConfig& cfg) {
    ModulatorConfig m;
    m.alpha = cfg.get_real("modulation", "alpha");
    m.tau = cfg.get_real("modulation", "tau");
    m.m_min = cfg.get_real("modulation", "m_min");
    m.m_max = cfg.get_real("modulation", "m_max");
    m.intrinsic_gain = cfg.get_real("modulation", "intrinsic_gain");
    m.err_smooth = cfg.get_real("modulation", "err_smooth");
    try {
        m.validate();
    } catch (const ContractError& e) {
        throw ConfigError(std::string("[modulation] ") + e.what());
    }
    return m;
}

std::uint64_t log_cadence(const std::string& experiment, const RunConfig& cfg) {
    const std::size_t v = nonnegative(cfg, "general", "log_every");
    if (v > 0) return v;
    return experiment == "charlm" ? 100 : 1;
}

double mean(const double* begin, const double* end) {
    if (begin == end) return 0.0;
    return std::accumulate(begin, end, 0.0) / static_cast<double>(end - begin);
}

std::uint64_t effective_ticks(const std::string& name, const RunConfig& cfg) {
    const std::size_t t = nonnegative(cfg, "general", "ticks");
    if (t > 0) return t;
    if (name == "charlm") return 500000;
    if (name == "saccade") return 20000;
    return 0;
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"charlm", "saccade", "arbitration", "skinner", "gradcheck"};
    return names;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

RunResult run_experiment(const std::string& name, RunConfig cfg, const RunOptions& opts) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw ConfigError("unknown experiment '" + name + "' (expected charlm, saccade, arbitration, skinner or gradcheck)");

    if (!cfg.explicitly_set("general", "out_dir"))
        if (const char* env = std::getenv("MHPM_OUT"); env && *env) cfg.set("general", "out_dir", env);
    const std::filesystem::path out_dir = cfg.get_string("general", "out_dir");
    if (out_dir.empty()) throw ConfigError("[general] out_dir must not be empty");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create out_dir " + out_dir.string() + ": " + ec.message());
    write_text(out_dir / "config-echo.txt", cfg.echo());

    std::optional<Checkpoint> resume;
    if (opts.resume) resume = Checkpoint::load(*opts.resume);

    MetricsLog metrics;
    Checkpoint final_state;
    ExperimentContext ctx{cfg, metrics, final_state, resume ? &*resume : nullptr, {}, {}};
    if (name == "charlm") run_charlm(ctx);
    else if (name == "saccade") run_saccade(ctx);
    else if (name == "arbitration") run_arbitration(ctx);
    else if (name == "skinner") run_skinner(ctx);
    else run_gradcheck(ctx);

    write_csv(out_dir / "metrics.csv", metrics.rows());
    final_state.save(out_dir / "checkpoint.txt");
    for (const auto& [file, text] : ctx.files) write_text(out_dir / file, text);
    return {out_dir, ctx.summary};
}

}  // namespace mhpm
