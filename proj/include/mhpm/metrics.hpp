#pragma once

// Long-format metrics rows and the CSV sink.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace mhpm {

struct MetricsRow {
    std::uint64_t tick = 0;
    std::string scope;
    std::string metric;
    double value = 0.0;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

// 9 significant digits, shortest form, '.' separator, locale independent.
std::string format_real(double v);

// Header, rows, then "# end". Throws ContractError before writing anything
// when ticks decrease, IoError when the stream fails. Returns bytes written.
std::size_t write_csv(std::ostream& os, const std::vector<MetricsRow>& rows);
std::size_t write_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);

// Parses a file produced by write_csv (used by tests and tools).
std::vector<MetricsRow> read_csv(const std::filesystem::path& path);

class MetricsLog {
public:
    void add(std::uint64_t tick, std::string scope, std::string metric, double value);
    const std::vector<MetricsRow>& rows() const { return rows_; }
    std::vector<MetricsRow>& rows() { return rows_; }

    // Values of one (scope, metric) series, in order.
    std::vector<double> series(const std::string& scope, const std::string& metric) const;

private:
    std::vector<MetricsRow> rows_;
};

}  // namespace mhpm
