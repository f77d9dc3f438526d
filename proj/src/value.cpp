#include "wasmk/value.hpp"

#include <sstream>

namespace wasmk {

std::string to_string(const Value& v) {
    std::ostringstream out;
    switch (v.type) {
    case ValueType::I32:
        out << "i32:" << static_cast<int32_t>(v.as_i32());
        break;
    case ValueType::I64:
        out << "i64:" << static_cast<int64_t>(v.as_i64());
        break;
    case ValueType::F32: out << "f32:" << v.as_f32(); break;
    case ValueType::F64: out << "f64:" << v.as_f64(); break;
    }
    return out.str();
}

std::string to_string(const std::vector<Value>& vs) {
    std::string out = "[";
    for (size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += to_string(vs[i]);
    }
    return out + "]";
}

const char* name(TrapKind k) {
    switch (k) {
    case TrapKind::TypeConfusion: return "type-confusion";
    case TrapKind::UnallocatedContinuation: return "unallocated-continuation";
    case TrapKind::RootViolation: return "root-violation";
    case TrapKind::HandlerReturned: return "handler-returned";
    case TrapKind::UnbalancedPrompt: return "unbalanced-prompt";
    case TrapKind::ResourceLimit: return "resource-limit";
    case TrapKind::Unreachable: return "unreachable";
    case TrapKind::DivideByZero: return "divide-by-zero";
    case TrapKind::MemoryOutOfBounds: return "memory-out-of-bounds";
    case TrapKind::HostError: return "host-error";
    }
    return "?";
}

std::string to_string(const Outcome& o) {
    if (o.is_trap())
        return std::string("trap(") + name(o.trap_kind) + ": " +
               o.trap_message + ")";
    return to_string(o.values);
}

}  // namespace wasmk
