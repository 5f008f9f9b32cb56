#pragma once

#include <cstdint>

// Parameter-access audit used to prove that learning stays local.
//
// Every unit instance carries a tag. The owner of a computation (the graph,
// or a test) opens a Scope naming the unit it intends to run; while the audit
// is enabled, any parameter read or write of a unit with a different tag
// counts as a violation. With no Scope open, accesses are not checked.
namespace mhpm::locality {

using UnitTag = std::uint64_t;

UnitTag next_tag();

void set_enabled(bool on);
bool enabled();
void reset_counters();
std::uint64_t violations();
std::uint64_t checks();

// Record an access to parameters owned by `owner`.
void touch(UnitTag owner);

class Scope {
public:
    explicit Scope(UnitTag active);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

private:
    UnitTag previous_;
};

}  // namespace mhpm::locality
