#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"

using namespace wasmk;

namespace {

std::string reject(const std::string& text) {
    try {
        validate(parse_module(text));
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

bool accepts(const std::string& text) { return reject(text).empty(); }

}  // namespace

TEST_CASE("accepts well-typed modules") {
    CHECK(accepts("(module)"));
    CHECK(accepts(R"((module
      (func (param i64) (result i64)
        local.get 0
        i64.const 1
        i64.add)))"));
    CHECK(accepts(R"((module
      (func (result i64)
        block (result i64)
          i64.const 1
          br 0
        end)))"));
}

TEST_CASE("every corpus module and trap fixture validates") {
    for (const char* name : {"quadruple", "block_br", "green_threads",
                             "generators", "prob_sum_d6"}) {
        CAPTURE(name);
        CHECK(accepts(
            testutil::read_file(testutil::corpus(name) + "/main.wat")));
    }
    for (const char* name :
         {"double_restore", "restore_at_root", "restore_unallocated",
          "copy_root", "copy_nil", "delete_root", "double_delete",
          "handler_returns", "ctable_overflow", "prompt_overflow",
          "epoch_scope"}) {
        CAPTURE(name);
        CHECK(accepts(testutil::read_file(
            testutil::fixture(std::string(name) + ".wat"))));
    }
}

TEST_CASE("branch may not escape a prompt") {
    std::string err = reject(R"((module
      (func
        block
          prompt
            br 1
          end
        end)))");
    CHECK(err.find("branch escapes prompt boundary") != std::string::npos);
    CHECK(err.find("func 0") != std::string::npos);

    // The same depth is fine without the prompt in between.
    CHECK(accepts(R"((module
      (func
        block
          block
            br 1
          end
        end)))"));

    // Branching within the prompt is fine.
    CHECK(accepts(R"((module
      (func
        prompt
          block
            br 0
          end
        end)))"));
}

TEST_CASE("return is invalid inside a prompt") {
    std::string err = reject(R"((module
      (func (result i64)
        prompt (result i64)
          i64.const 1
          return
        end)))");
    CHECK(err.find("return invalid inside prompt") != std::string::npos);

    CHECK(accepts(R"((module
      (func (result i64)
        i64.const 1
        return)))"));
}

TEST_CASE("control requires a [i64 i64] -> [] handler") {
    const char* fmt = R"((module
      (func $h %s)
      (func
        i64.const 0
        control $h
        drop)))";
    for (const char* sig : {"(param i32) (param i64)", "(param i64)", ""}) {
        CAPTURE(sig);
        char buf[512];
        snprintf(buf, sizeof buf, fmt, sig);
        std::string err = reject(buf);
        CHECK(err.find("control handler signature must be [i64 i64] -> []") !=
              std::string::npos);
    }
    // A handler that produces a result has the wrong type too.
    std::string err = reject(R"((module
      (func $h (param i64) (param i64) (result i64)
        i64.const 0)
      (func
        i64.const 0
        control $h
        drop)))");
    CHECK(err.find("control handler signature must be [i64 i64] -> []") !=
          std::string::npos);

    char good[512];
    snprintf(good, sizeof good, fmt, "(param i64) (param i64)");
    CHECK(accepts(good));
}

TEST_CASE("control and restore operand typing") {
    // control needs an i64 on the stack.
    CHECK(reject(R"((module
      (func $h (param i64) (param i64))
      (func
        i32.const 0
        control $h
        drop)))") != "");
    // restore consumes kappa under the payload.
    CHECK(accepts(R"((module
      (func $h (param i64) (param i64)
        local.get 0
        local.get 1
        restore)))"));
    CHECK(reject(R"((module
      (func
        i32.const 0
        i64.const 0
        restore)))") != "");
    // copy is i64 -> i64, delete is i64 -> [].
    CHECK(accepts(R"((module
      (func (param i64) (result i64)
        local.get 0
        continuation_copy)))"));
    CHECK(accepts(R"((module
      (func (param i64)
        local.get 0
        continuation_delete)))"));
    CHECK(reject(R"((module
      (func (param i32) (result i64)
        local.get 0
        continuation_copy)))") != "");
}

TEST_CASE("restore is stack-polymorphic like unreachable") {
    CHECK(accepts(R"((module
      (func $h (param i64) (param i64)
        local.get 0
        local.get 1
        restore
        i64.add
        drop)))"));
}

TEST_CASE("classic stack discipline errors") {
    CHECK(reject("(module (func i64.add))").find("stack underflow") !=
          std::string::npos);
    CHECK(reject("(module (func i64.const 1))") != "");  // value left over
    CHECK(reject(R"((module (func
      i32.const 1
      i64.const 2
      i64.add
      drop)))") != "");
    CHECK(reject("(module (func br 3))").find("unknown label") !=
          std::string::npos);
    CHECK(reject("(module (func (result i64) nop))") != "");
}

TEST_CASE("errors name the function and instruction ordinal") {
    std::string err = reject(R"((module
      (func $first (param i64) (result i64) local.get 0)
      (func $broken
        nop
        i64.add)))");
    CHECK(err.find("func 1 ($broken)") != std::string::npos);
    CHECK(err.find("instruction #") != std::string::npos);
}

TEST_CASE("module-level checks") {
    // export of an unknown function index
    CHECK_THROWS(validate(parse_module(R"((module (export "f" (func 3))))")));
    // duplicate export names
    CHECK_THROWS(validate(parse_module(R"((module
      (func $a)
      (func $b)
      (export "f" (func $a))
      (export "f" (func $b))))")));
    // call of an unknown function
    CHECK_THROWS(parse_module("(module (func call $nosuch))"));
    // table element out of range
    CHECK_THROWS(validate(parse_module(R"((module
      (table 1 funcref)
      (elem (i32.const 0) 9)))")));
}

TEST_CASE("if arms must agree with the annotation") {
    CHECK(accepts(R"((module
      (func (param i32) (result i64)
        local.get 0
        if (result i64)
          i64.const 1
        else
          i64.const 2
        end)))"));
    CHECK(reject(R"((module
      (func (param i32) (result i64)
        local.get 0
        if (result i64)
          i64.const 1
        else
          i32.const 2
        end)))") != "");
}

TEST_CASE("branches inside handlers behave normally") {
    CHECK(accepts(R"((module
      (func $h (param i64) (param i64)
        block
          local.get 1
          i64.eqz
          br_if 0
          local.get 0
          local.get 1
          restore
        end)))"));
}
