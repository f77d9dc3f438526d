#pragma once

#include <stdexcept>
#include <string>

#include "wasmk/ast.hpp"

namespace wasmk {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A module that has passed type checking. Engines only accept these.
struct ValidatedModule {
    Module module;

    const FuncType& func_type(uint32_t index) const {
        return module.func_type(index);
    }
};

ValidatedModule validate(Module m);

}  // namespace wasmk
