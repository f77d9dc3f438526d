#pragma once

#include "wasmk/oracle.hpp"
#include "wasmk/parser.hpp"
#include "wasmk/interpreter.hpp"

namespace wasmk {

struct ScriptResult {
    struct Failure {
        int line = 0;
        std::string what;
    };
    size_t directives = 0;
    std::vector<Failure> failures;

    bool ok() const { return failures.empty(); }
};

struct ScriptOptions {
    RuntimeLimits limits;
    uint64_t fuel = 1'000'000;
    bool check_preservation = false;
    // receives the fast engine's host output, if non-null
    std::string* host_output = nullptr;
};

// Runs every directive against both engines. assert_return and assert_trap
// require the engines to agree with the expectation and with each other
// (outcome and host output). assert_invalid exercises the validator only;
// the expected message is matched as a substring.
ScriptResult run_script(const Script& script, const ScriptOptions& options = {});

}  // namespace wasmk
