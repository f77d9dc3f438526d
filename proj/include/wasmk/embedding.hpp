#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wasmk/ast.hpp"
#include "wasmk/value.hpp"

namespace wasmk {

// Host callbacks signal failure by throwing Trap{TrapKind::HostError, ...}.
struct HostFunction {
    std::string name;  // "module.item"
    FuncType type;
    std::function<std::vector<Value>(const std::vector<Value>&)> behavior;
};

class HostRegistry {
public:
    void register_host_function(
        const std::string& name, FuncType type,
        std::function<std::vector<Value>(const std::vector<Value>&)>
            behavior);

    const HostFunction* find(const std::string& name) const;

private:
    std::vector<HostFunction> funcs_;
};

// The imports used by the bundled programs: env.print_i64 (i64 -> [])
// writes the decimal value to *sink, env.print_char (i32 -> []) writes the
// raw byte. The sink must outlive the registry.
HostRegistry standard_host_registry(std::string* sink);

}  // namespace wasmk
