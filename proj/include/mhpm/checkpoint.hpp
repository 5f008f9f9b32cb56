#pragma once

// Versioned text checkpoint: a header line, then named flat real-number arrays
// (parameters, windows, buffers, counters) and named text records (RNG
// engine states). Reals are written with 17 significant digits so a
// save/load round trip is exact.
//
//   mhpm-checkpoint 1
//   array <name> <count>
//   <v0> <v1> ...
//   text <name>
//   <one line>
//   end

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mhpm {

class Checkpoint {
public:
    static constexpr int kVersion = 1;

    void put(const std::string& name, std::vector<double> values);
    void put_text(const std::string& name, std::string text);

    bool has(const std::string& name) const { return arrays_.count(name) || texts_.count(name); }
    const std::vector<double>& get(const std::string& name) const;
    const std::string& get_text(const std::string& name) const;

    void write(std::ostream& os) const;
    static Checkpoint read(std::istream& is);

    void save(const std::filesystem::path& path) const;
    static Checkpoint load(const std::filesystem::path& path);

    const std::map<std::string, std::vector<double>>& arrays() const { return arrays_; }

private:
    std::map<std::string, std::vector<double>> arrays_;
    std::map<std::string, std::string> texts_;
};

}  // namespace mhpm
