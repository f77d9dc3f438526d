#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"

using namespace wasmk;
using testutil::make_engines;

TEST_CASE("duplicate host registration is refused") {
    HostRegistry reg;
    FuncType t{{ValueType::I64}, {}};
    reg.register_host_function("env.f", t, [](const std::vector<Value>&) {
        return std::vector<Value>{};
    });
    CHECK_THROWS_AS(reg.register_host_function(
                        "env.f", t,
                        [](const std::vector<Value>&) {
                            return std::vector<Value>{};
                        }),
                    std::runtime_error);
    CHECK(reg.find("env.f") != nullptr);
    CHECK(reg.find("env.g") == nullptr);
}

TEST_CASE("standard host functions write to the sink") {
    auto e = make_engines(R"((module
      (import "env" "print_i64" (func $pi (param i64)))
      (import "env" "print_char" (func $pc (param i32)))
      (func (export "main")
        i64.const -42
        call $pi
        i32.const 33
        call $pc)))");
    invoke(*e->fast, "main", {});
    CHECK(e->fast_out == "-42!");
}

TEST_CASE("link failures") {
    std::string missing = R"((module
      (import "env" "no_such_host" (func (param i64)))))";
    std::string mistyped = R"((module
      (import "env" "print_i64" (func (param i32)))))";
    CHECK_THROWS_AS(make_engines(missing), std::runtime_error);
    CHECK_THROWS_AS(make_engines(mistyped), std::runtime_error);
}

TEST_CASE("table is padded and memory zeroed at link time") {
    auto e = make_engines(R"((module
      (table 4 funcref)
      (elem (i32.const 1) $f)
      (memory 2)
      (func $f))
    )");
    const Instance& inst = e->fast->instance;
    REQUIRE(inst.table.size() == 4);
    CHECK(inst.table[0] == UINT32_MAX);
    CHECK(inst.table[1] == 0);
    CHECK(inst.table[3] == UINT32_MAX);
    REQUIRE(inst.memory.size() == 2 * 65536);
    CHECK(inst.memory[12345] == 0);
}

TEST_CASE("host_call_in preserves pstack depth on every outcome") {
    auto e = make_engines(R"((module
      (func (export "ok") (result i64) i64.const 1)
      (func (export "bad") unreachable)
      (func (export "leaky")
        i64.const 0
        control $h
        drop)
      (func $h (param i64) (param i64)
        i64.const 99
        i64.const 0
        restore)))");
    CHECK(e->fast->pstack.depth() == 0);
    Outcome ok = host_call_in(*e->fast, "ok", {});
    CHECK(!ok.is_trap());
    CHECK(e->fast->pstack.depth() == 0);
    Outcome bad = host_call_in(*e->fast, "bad", {});
    CHECK(bad.is_trap());
    CHECK(e->fast->pstack.depth() == 0);
    // "leaky" restores an unallocated ID; the trap path must still pop
    // the implicit prompt.
    Outcome leaky = host_call_in(*e->fast, "leaky", {});
    CHECK(leaky.is_trap());
    CHECK(e->fast->pstack.depth() == 0);
}

TEST_CASE("host errors surface as host-error traps in both engines") {
    std::string text = R"((module
      (import "env" "fail" (func $fail))
      (func (export "main")
        call $fail)))";
    HostRegistry reg;
    reg.register_host_function("env.fail", FuncType{{}, {}},
                               [](const std::vector<Value>&)
                                   -> std::vector<Value> {
                                   throw Trap{TrapKind::HostError,
                                              "simulated device failure"};
                               });
    ValidatedModule vm = validate(parse_module(text));
    auto fast = instantiate<FastCtx>(vm, reg);
    auto oracle = instantiate<OCtx>(vm, reg);
    Outcome f = invoke(fast, "main", {});
    OracleOutcome o = oracle_invoke(oracle, "main", {});
    REQUIRE(f.is_trap());
    CHECK(f.trap_kind == TrapKind::HostError);
    CHECK(f.same_observable(o.outcome));
    CHECK(fast.pstack.depth() == 0);
    CHECK(oracle.pstack.depth() == 0);
}

TEST_CASE("reentrancy: a host function may call back into the store") {
    std::string text = R"((module
      (import "env" "reenter" (func $re (param i64) (result i64)))
      (func (export "double") (param i64) (result i64)
        local.get 0
        i64.const 2
        i64.mul)
      (func (export "main") (result i64)
        i64.const 21
        call $re)))";
    FastStore* store_ptr = nullptr;
    HostRegistry reg;
    reg.register_host_function(
        "env.reenter", FuncType{{ValueType::I64}, {ValueType::I64}},
        [&store_ptr](const std::vector<Value>& args) {
            Outcome o = host_call_in(*store_ptr, "double", args);
            REQUIRE(!o.is_trap());
            return o.values;
        });
    ValidatedModule vm = validate(parse_module(text));
    FastStore store = instantiate<FastCtx>(vm, reg);
    store_ptr = &store;
    Outcome o = invoke(store, "main", {});
    CHECK(o.values == std::vector<Value>{Value::i64(42)});
    CHECK(store.pstack.depth() == 0);
}

TEST_CASE("reentrant capture stays delimited to the inner invoke") {
    // The nested invoke has its own implicit prompt, so a capture inside
    // it cannot see (or resume into) the outer invoke's stack.
    std::string text = R"((module
      (import "env" "reenter" (func $re (param i64) (result i64)))
      (func $h (param i64) (param i64)
        local.get 0
        local.get 1
        i64.const 1
        i64.add
        restore)
      (func (export "inner") (param i64) (result i64)
        local.get 0
        control $h)
      (func (export "main") (result i64)
        i64.const 5
        call $re)))";
    FastStore* store_ptr = nullptr;
    size_t depth_seen = SIZE_MAX;
    HostRegistry reg;
    reg.register_host_function(
        "env.reenter", FuncType{{ValueType::I64}, {ValueType::I64}},
        [&](const std::vector<Value>& args) {
            depth_seen = store_ptr->pstack.depth();
            Outcome o = host_call_in(*store_ptr, "inner", args);
            REQUIRE(!o.is_trap());
            // The inner prompt is gone again by the time we return.
            CHECK(store_ptr->pstack.depth() == depth_seen);
            return o.values;
        });
    ValidatedModule vm = validate(parse_module(text));
    FastStore store = instantiate<FastCtx>(vm, reg);
    store_ptr = &store;
    Outcome o = invoke(store, "main", {});
    CHECK(o.values == std::vector<Value>{Value::i64(6)});
    CHECK(depth_seen == 1);  // outer implicit prompt was live
    CHECK(store.pstack.depth() == 0);
}
