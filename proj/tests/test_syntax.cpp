#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"

using namespace wasmk;

TEST_CASE("parses a minimal module") {
    Module m = parse_module("(module)");
    CHECK(m.funcs.empty());
    CHECK(m.exports.empty());
}

TEST_CASE("parses functions, params, results, and locals") {
    Module m = parse_module(R"((module
      (func $f (param $x i64) (param i32) (result i64)
        (local $t i64)
        local.get $x
        local.set $t
        local.get $t)
      (export "f" (func $f))))");
    REQUIRE(m.funcs.size() == 1);
    const FuncDecl& f = m.funcs[0];
    const FuncType& ft = m.types[f.type_index];
    CHECK(ft.params == std::vector<ValueType>{ValueType::I64, ValueType::I32});
    CHECK(ft.results == std::vector<ValueType>{ValueType::I64});
    CHECK(f.locals == std::vector<ValueType>{ValueType::I64});
    REQUIRE(m.exports.size() == 1);
    CHECK(m.exports[0].name == "f");
}

TEST_CASE("parses the continuation instructions") {
    Module m = parse_module(R"((module
      (func $h (param i64) (param i64))
      (func
        i64.const 0
        control $h
        continuation_copy
        continuation_delete
        i64.const 1
        i64.const 2
        restore)
      (func
        prompt
          nop
        end)))");
    const auto& body = m.funcs[1].body;
    REQUIRE(body.size() == 7);
    CHECK(body[1].op == Op::Control);
    CHECK(body[1].imm == 0);  // resolved handler index
    CHECK(body[2].op == Op::ContinuationCopy);
    CHECK(body[3].op == Op::ContinuationDelete);
    CHECK(body[6].op == Op::Restore);
    CHECK(m.funcs[2].body[0].op == Op::Prompt);
}

TEST_CASE("parses block structure with result annotations") {
    Module m = parse_module(R"((module
      (func (result i64)
        block (result i64)
          loop
            br 1
          end
          i64.const 1
        end)))");
    const Instruction& blk = m.funcs[0].body[0];
    CHECK(blk.op == Op::Block);
    REQUIRE(blk.block_type.results.size() == 1);
    CHECK(blk.block_type.results[0] == ValueType::I64);
    CHECK(blk.body[0].op == Op::Loop);
}

TEST_CASE("parses if/else and br_table") {
    Module m = parse_module(R"((module
      (func (param i32) (result i64)
        block
          block
            local.get 0
            br_table 0 1 0
          end
        end
        local.get 0
        if (result i64)
          i64.const 1
        else
          i64.const 2
        end)))");
    const auto& body = m.funcs[0].body;
    const Instruction& bt = body[0].body[0].body[1];
    CHECK(bt.op == Op::BrTable);
    CHECK(bt.br_targets == std::vector<uint32_t>{0, 1, 0});
    const Instruction& iff = body[2];
    CHECK(iff.op == Op::If);
    CHECK(iff.body.size() == 1);
    CHECK(iff.else_body.size() == 1);
}

TEST_CASE("parses memory, table, elem, globals, imports") {
    Module m = parse_module(R"((module
      (import "env" "print_i64" (func $p (param i64)))
      (type $void (func))
      (table 3 funcref)
      (elem (i32.const 1) $f)
      (memory 2)
      (global $g (mut i64) (i64.const 7))
      (func $f
        i32.const 0
        call_indirect (type $void))))");
    REQUIRE(m.imports.size() == 1);
    CHECK(m.imports[0].module_name == "env");
    CHECK(m.imports[0].item_name == "print_i64");
    CHECK(m.has_table);
    CHECK(m.table_size == 3);
    REQUIRE(m.table.size() >= 2);
    CHECK(m.table[1] == 1);  // $f at func index 1 (after the import)
    CHECK(m.table[0] == UINT32_MAX);
    CHECK(m.has_memory);
    CHECK(m.memory_pages == 2);
    REQUIRE(m.globals.size() == 1);
    CHECK(m.globals[0].init_bits == 7);
}

TEST_CASE("every corpus module parses and round-trips") {
    for (const char* name : {"quadruple", "block_br", "green_threads",
                             "generators", "prob_sum_d6"}) {
        CAPTURE(name);
        Module m =
            parse_module(testutil::read_file(testutil::corpus(name) + "/main.wat"));
        Module again = parse_module(print_module(m));
        CHECK(structurally_equal(m, again));
    }
}

TEST_CASE("every trap fixture parses and round-trips") {
    for (const char* name :
         {"double_restore", "restore_at_root", "restore_unallocated",
          "copy_root", "copy_nil", "delete_root", "double_delete",
          "handler_returns", "ctable_overflow", "prompt_overflow",
          "epoch_scope"}) {
        CAPTURE(name);
        Module m = parse_module(
            testutil::read_file(testutil::fixture(std::string(name) + ".wat")));
        Module again = parse_module(print_module(m));
        CHECK(structurally_equal(m, again));
    }
}

TEST_CASE("comments and strings tokenize correctly") {
    Module m = parse_module(
        "(module ;; line comment\n"
        "  (; block (; nested ;) comment ;)\n"
        "  (func (export \"na\\\"me\") nop))");
    REQUIRE(m.exports.size() == 1);
    CHECK(m.exports[0].name == "na\"me");
}

TEST_CASE("parse errors carry positions") {
    try {
        parse_module("(module\n  (func\n    bogus.op))");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("3:") != std::string::npos);
    }
}

TEST_CASE("malformed input is rejected") {
    CHECK_THROWS_AS(parse_module("(module"), ParseError);
    CHECK_THROWS_AS(parse_module("(module (func (block)))"), ParseError);
    CHECK_THROWS_AS(parse_module("(module (func control $nosuch))"),
                    ParseError);
    CHECK_THROWS_AS(parse_module("(module (func br $nolabel))"), ParseError);
    CHECK_THROWS_AS(parse_module("(module (func i64.const))"), ParseError);
    CHECK_THROWS_AS(parse_module("(frobnicate)"), ParseError);
}

TEST_CASE("script directives parse") {
    Script s = parse_script(R"(
      (module (func (export "id") (param i64) (result i64) local.get 0))
      (assert_return (invoke "id" (i64.const 3)) (i64.const 3))
      (assert_trap (invoke "id" (i64.const 0)) "whatever")
      (assert_invalid (module (func i64.const 1)) "values left")
    )");
    REQUIRE(s.directives.size() == 4);
    CHECK(s.directives[0].kind == Directive::Kind::ModuleDef);
    CHECK(s.directives[1].kind == Directive::Kind::AssertReturn);
    CHECK(s.directives[1].invoke.export_name == "id");
    CHECK(s.directives[1].expected == std::vector<Value>{Value::i64(3)});
    CHECK(s.directives[2].kind == Directive::Kind::AssertTrap);
    CHECK(s.directives[3].kind == Directive::Kind::AssertInvalid);
}

TEST_CASE("script invoking an unknown export is rejected") {
    CHECK_THROWS_AS(parse_script(R"(
      (module (func (export "f")))
      (assert_return (invoke "g"))
    )"),
                    ParseError);
}
