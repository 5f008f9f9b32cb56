#include "mhpm/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mhpm/errors.hpp"

namespace mhpm {

std::string format_real(double v) {
    require(std::isfinite(v), "format_real: non-finite value");
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, r.ptr);
}

std::size_t write_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i)
        require(rows[i].tick >= rows[i - 1].tick,
                "write_csv: tick order violated at row " + std::to_string(i + 1) + " (" +
                    std::to_string(rows[i].tick) + " after " + std::to_string(rows[i - 1].tick) + ")");
    for (const auto& r : rows) {
        require(std::isfinite(r.value), "write_csv: non-finite value for " + r.scope + "/" + r.metric);
        require(r.scope.find_first_of(",\n") == std::string::npos && r.metric.find_first_of(",\n") == std::string::npos,
                "write_csv: scope/metric must not contain ',' or newline");
    }
    std::string text = "tick,scope,metric,value\n";
    for (const auto& r : rows) {
        text += std::to_string(r.tick);
        text += ',';
        text += r.scope;
        text += ',';
        text += r.metric;
        text += ',';
        text += format_real(r.value);
        text += '\n';
    }
    text += "# end\n";
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    os.flush();
    if (!os) throw IoError("write_csv: stream write failed");
    return text.size();
}

std::size_t write_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return write_csv(out, rows);
}

std::vector<MetricsRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "tick,scope,metric,value") throw IoError("bad metrics header: " + path.string());
    std::vector<MetricsRow> rows;
    bool ended = false;
    while (std::getline(in, line)) {
        if (line == "# end") {
            ended = true;
            break;
        }
        std::istringstream ss(line);
        MetricsRow r;
        std::string tick, value;
        if (!std::getline(ss, tick, ',') || !std::getline(ss, r.scope, ',') || !std::getline(ss, r.metric, ',') ||
            !std::getline(ss, value))
            throw IoError("malformed metrics row: " + line);
        r.tick = std::stoull(tick);
        std::from_chars(value.data(), value.data() + value.size(), r.value);
        rows.push_back(std::move(r));
    }
    if (!ended) throw IoError("metrics file lacks end marker (partial write): " + path.string());
    return rows;
}

void MetricsLog::add(std::uint64_t tick, std::string scope, std::string metric, double value) {
    rows_.push_back({tick, std::move(scope), std::move(metric), value});
}

std::vector<double> MetricsLog::series(const std::string& scope, const std::string& metric) const {
    std::vector<double> out;
    for (const auto& r : rows_)
        if (r.scope == scope && r.metric == metric) out.push_back(r.value);
    return out;
}

}  // namespace mhpm
