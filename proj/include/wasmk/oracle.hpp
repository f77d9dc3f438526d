#pragma once

#include "wasmk/runtime.hpp"

namespace wasmk {

// The reference engine represents configurations literally: a term sequence
// in which values are const instructions and structural state (entered
// blocks, call frames, pending prompt ends, pending traps) appears as
// administrative terms. One step = decompose to the innermost redex, apply
// exactly one rule.
struct OTerm {
    enum class K {
        Ins,        // an instruction (consts are the values)
        Label,      // entered block: body runs inside, br targets it
        Framed,     // function activation: locals + body
        PromptEnd,  // administrative end of a prompt scope
        TrapTerm,   // pending trap (fires only when it becomes the redex)
        Hole,       // capture hole; appears only inside saved contexts
    };

    K kind = K::Ins;
    Instruction ins;          // Ins
    uint32_t arity = 0;       // Label: values a branch to it carries
    std::vector<OTerm> cont;  // Label: continuation of a branch (loop redo)
    std::vector<OTerm> body;  // Label / Framed
    std::vector<Value> locals;  // Framed
    uint32_t func_index = 0;    // Framed
    TrapKind trap_kind = TrapKind::Unreachable;  // TrapTerm
    std::string trap_msg;                        // TrapTerm
};

using OSeq = std::vector<OTerm>;

// A captured full-stack context: the whole configuration with one Hole at
// the captured redex position.
struct OCtx {
    std::vector<Value> locals;
    uint32_t entry_func = 0;
    std::vector<ValueType> cur_type;
    OSeq terms;
};

using OracleStore = Store<OCtx>;

struct OracleConfig {
    std::vector<Value> locals;  // top-level activation's locals
    uint32_t entry_func = 0;
    std::vector<ValueType> cur_type;  // maintained top-level sequence type
    OSeq terms;
};

struct OracleOptions {
    uint64_t fuel = 1'000'000;
    bool check_preservation = false;
    bool trace = false;
    std::string* trace_sink = nullptr;  // defaults to stdout when tracing
};

struct OracleOutcome {
    Outcome outcome;
    bool out_of_fuel = false;
    uint64_t steps = 0;
};

// true when the configuration needs no further steps (all values, or a
// lone pending trap).
bool oracle_terminal(const OracleConfig& config);

// Applies exactly one reduction rule. Precondition: not terminal.
// rule_out, when non-null, receives the applied rule's name.
void oracle_step(OracleStore& store, OracleConfig& config,
                 std::string* rule_out = nullptr,
                 std::string* redex_out = nullptr);

// Types the configuration per the root/non-root discipline: when some
// prompt context holds a non-nil root, the recorded type of the topmost
// such root's entry; otherwise the maintained direct type. nullopt when no
// rule applies (a prompt end is pending while the top root is non-nil).
std::optional<std::vector<ValueType>> type_configuration(
    OracleStore& store, const OracleConfig& config);

// Runs an exported function under an implicit prompt, stepping the literal
// semantics until terminal or out of fuel. Mirrors interpreter::invoke.
OracleOutcome oracle_invoke(OracleStore& store,
                            const std::string& export_name,
                            std::vector<Value> args,
                            const OracleOptions& options = {});

}  // namespace wasmk
