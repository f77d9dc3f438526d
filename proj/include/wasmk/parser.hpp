#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "wasmk/ast.hpp"
#include "wasmk/value.hpp"

namespace wasmk {

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(std::string msg, int line_, int col_)
        : std::runtime_error(msg + " at " + std::to_string(line_) + ":" +
                             std::to_string(col_)),
          line(line_),
          column(col_) {}
};

Module parse_module(const std::string& text);

struct Invocation {
    std::string export_name;
    std::vector<Value> args;
};

struct Directive {
    enum class Kind { ModuleDef, AssertReturn, AssertTrap, AssertInvalid };
    Kind kind = Kind::ModuleDef;
    Module module;  // ModuleDef / AssertInvalid
    Invocation invoke;
    std::vector<Value> expected;  // AssertReturn
    std::string message;          // AssertTrap / AssertInvalid substring
    int line = 0;
};

struct Script {
    std::vector<Directive> directives;
};

Script parse_script(const std::string& text);

}  // namespace wasmk
