#include "mhpm/locality.hpp"

#include <atomic>

namespace mhpm::locality {

namespace {

std::atomic<UnitTag> g_next{1};
std::atomic<bool> g_enabled{false};
std::atomic<std::uint64_t> g_violations{0};
std::atomic<std::uint64_t> g_checks{0};
thread_local UnitTag t_active = 0;

}  // namespace

UnitTag next_tag() { return g_next.fetch_add(1, std::memory_order_relaxed); }

void set_enabled(bool on) { g_enabled.store(on, std::memory_order_relaxed); }
bool enabled() { return g_enabled.load(std::memory_order_relaxed); }

void reset_counters() {
    g_violations.store(0);
    g_checks.store(0);
}

std::uint64_t violations() { return g_violations.load(); }
std::uint64_t checks() { return g_checks.load(); }

void touch(UnitTag owner) {
    if (!g_enabled.load(std::memory_order_relaxed) || t_active == 0) return;
    g_checks.fetch_add(1, std::memory_order_relaxed);
    if (owner != t_active) g_violations.fetch_add(1, std::memory_order_relaxed);
}

Scope::Scope(UnitTag active) : previous_(t_active) { t_active = active; }
Scope::~Scope() { t_active = previous_; }

}  // namespace mhpm::locality
