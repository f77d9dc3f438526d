#pragma once

#include "wasmk/runtime.hpp"

namespace wasmk {

// A suspended (or active) activation: locals, operand stack, and the stack
// of entered blocks with their resume positions. Bodies are pointers into
// the module AST, which outlives every store.
struct FastFrame {
    static constexpr uint32_t kTrapSentinel = UINT32_MAX;

    uint32_t func_index = 0;  // kTrapSentinel: trap when control reaches it
    std::vector<Value> locals;
    std::vector<Value> stack;

    struct Block {
        const std::vector<Instruction>* body;
        size_t pc;          // next instruction
        size_t stack_base;  // operand height at block entry
        uint32_t arity;     // result count
        bool is_loop;
        bool is_prompt;
    };
    std::vector<Block> blocks;
};

// Captured context of the fast engine: the whole frame stack of one invoke.
struct FastCtx {
    std::vector<FastFrame> frames;
};

using FastStore = Store<FastCtx>;

// Runs an exported function to completion under an implicit prompt.
// Argument arity/type mismatch is an API error (std::invalid_argument),
// not a trap. The pstack depth after the call equals the depth before,
// for every outcome.
Outcome invoke(FastStore& store, const std::string& export_name,
               std::vector<Value> args);

// The host->wasm entry point is exactly invoke: the implicit prompt makes
// the call complete exactly once (values or trap) from the host's view.
inline Outcome host_call_in(FastStore& store, const std::string& export_name,
                            std::vector<Value> args) {
    return invoke(store, export_name, std::move(args));
}

}  // namespace wasmk
