#pragma once

// INI-style run configuration:
//
//   # comment
//   [section]
//   key = value
//
// Every key is declared in a schema with a type and a default. Unknown keys,
// malformed lines and ill-typed values throw ConfigError. A later duplicate
// overrides an earlier one.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mhpm {

enum class ValueType { Int, Real, Bool, String };

struct KeySpec {
    const char* section;
    const char* key;
    ValueType type;
    const char* default_value;
    const char* doc;
};

const std::vector<KeySpec>& config_schema();
const char* to_string(ValueType t);

class RunConfig {
public:
    // All defaults.
    RunConfig();

    static RunConfig parse(std::string_view text);
    static RunConfig load(const std::filesystem::path& path);

    // Validates section, key and type.
    void set(const std::string& section, const std::string& key, const std::string& value);
    bool explicitly_set(const std::string& section, const std::string& key) const;

    std::int64_t get_int(const std::string& section, const std::string& key) const;
    double get_real(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;
    const std::string& get_string(const std::string& section, const std::string& key) const;

    // Comma-separated list of integers / strings.
    std::vector<std::int64_t> get_int_list(const std::string& section, const std::string& key) const;
    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;

    // Every effective key = value, schema order; parses back to the same config.
    std::string echo() const;

private:
    using Key = std::pair<std::string, std::string>;
    const KeySpec& spec(const std::string& section, const std::string& key) const;
    const std::string& raw(const std::string& section, const std::string& key, ValueType want) const;

    std::map<Key, std::string> values_;
    std::map<Key, bool> set_;
};

}  // namespace mhpm
