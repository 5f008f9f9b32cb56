#pragma once

// Shared helpers for the experiment drivers.

#include <cstddef>
#include <cstdint>
#include <string>

#include "mhpm/config.hpp"
#include "mhpm/modulation.hpp"

namespace mhpm {

// Integer key that must be > 0 / >= 0; ConfigError otherwise.
std::size_t positive(const RunConfig& cfg, const std::string& section, const std::string& key);
std::size_t nonnegative(const RunConfig& cfg, const std::string& section, const std::string& key);

ModulatorConfig modulator_config(const RunConfig& cfg);

// [general] log_every, or the experiment default when 0.
std::uint64_t log_cadence(const std::string& experiment, const RunConfig& cfg);

double mean(const double* begin, const double* end);

}  // namespace mhpm
