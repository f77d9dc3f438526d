#include "wasmk/embedding.hpp"

#include "wasmk/runtime.hpp"

namespace wasmk {

Instance link_instance(const ValidatedModule& module,
                       const HostRegistry& hosts) {
    Instance inst;
    inst.module = &module;
    for (const ImportDecl& imp : module.module.imports) {
        std::string full = imp.module_name + "." + imp.item_name;
        const HostFunction* h = hosts.find(full);
        if (!h) throw std::runtime_error("unresolved import: " + full);
        if (!(h->type == module.module.types[imp.type_index]))
            throw std::runtime_error("import type mismatch: " + full);
        inst.host_funcs.push_back(h);
    }
    for (const GlobalDecl& g : module.module.globals)
        inst.globals.push_back(Value{g.type, g.init_bits});
    inst.table = module.module.table;
    inst.table.resize(module.module.table_size, UINT32_MAX);
    inst.memory.assign(size_t{module.module.memory_pages} * 65536, 0);
    return inst;
}

void HostRegistry::register_host_function(
    const std::string& name, FuncType type,
    std::function<std::vector<Value>(const std::vector<Value>&)> behavior) {
    if (find(name))
        throw std::runtime_error("host function already registered: " + name);
    funcs_.push_back({name, std::move(type), std::move(behavior)});
}

const HostFunction* HostRegistry::find(const std::string& name) const {
    for (const HostFunction& f : funcs_)
        if (f.name == name) return &f;
    return nullptr;
}

HostRegistry standard_host_registry(std::string* sink) {
    HostRegistry reg;
    reg.register_host_function(
        "env.print_i64", FuncType{{ValueType::I64}, {}},
        [sink](const std::vector<Value>& args) {
            *sink += std::to_string(static_cast<int64_t>(args[0].as_i64()));
            return std::vector<Value>{};
        });
    reg.register_host_function(
        "env.print_char", FuncType{{ValueType::I32}, {}},
        [sink](const std::vector<Value>& args) {
            *sink += static_cast<char>(args[0].as_i32() & 0xff);
            return std::vector<Value>{};
        });
    return reg;
}

}  // namespace wasmk
