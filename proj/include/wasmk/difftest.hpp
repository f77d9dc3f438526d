#pragma once

#include <cstdint>
#include <string>

namespace wasmk {

struct DifftestOptions {
    uint64_t seed = 42;
    size_t count = 500;
    bool check_preservation = true;
    uint64_t fuel = 1'000'000;
};

struct DifftestResult {
    size_t cases = 0;
    size_t failures = 0;
    std::string first_failure;  // case description + module text

    bool ok() const { return failures == 0; }
};

// Generates random well-typed programs from a fixed set of templates
// (pure arithmetic/blocks, capture-restore with and without an enclosing
// prompt, and deliberately trapping variants), runs both engines on each,
// and checks that outcomes agree, host-visible behavior matches the
// template's expected class, and (optionally) per-step preservation holds.
DifftestResult run_difftest(const DifftestOptions& options = {});

}  // namespace wasmk
