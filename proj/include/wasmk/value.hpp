#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "wasmk/ast.hpp"

namespace wasmk {

struct Value {
    ValueType type = ValueType::I32;
    uint64_t bits = 0;  // f32 stored in the low 32 bits

    static Value i32(uint32_t v) { return {ValueType::I32, v}; }
    static Value i64(uint64_t v) { return {ValueType::I64, v}; }
    static Value f32(float v) {
        uint32_t b;
        std::memcpy(&b, &v, 4);
        return {ValueType::F32, b};
    }
    static Value f64(double v) {
        uint64_t b;
        std::memcpy(&b, &v, 8);
        return {ValueType::F64, b};
    }

    uint32_t as_i32() const { return static_cast<uint32_t>(bits); }
    uint64_t as_i64() const { return bits; }
    float as_f32() const {
        float v;
        uint32_t b = static_cast<uint32_t>(bits);
        std::memcpy(&v, &b, 4);
        return v;
    }
    double as_f64() const {
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    bool operator==(const Value&) const = default;
};

std::string to_string(const Value& v);
std::string to_string(const std::vector<Value>& vs);

enum class TrapKind {
    TypeConfusion,
    UnallocatedContinuation,
    RootViolation,
    HandlerReturned,
    UnbalancedPrompt,
    ResourceLimit,
    Unreachable,
    DivideByZero,
    MemoryOutOfBounds,
    HostError,
};

const char* name(TrapKind k);

// Thrown by the engines; converted to Outcome at the invoke boundary.
struct Trap {
    TrapKind kind;
    std::string message;
};

struct Outcome {
    enum class Kind { Values, Trap } kind = Kind::Values;
    std::vector<Value> values;
    TrapKind trap_kind = TrapKind::Unreachable;
    std::string trap_message;

    static Outcome ok(std::vector<Value> vs) {
        Outcome o;
        o.kind = Kind::Values;
        o.values = std::move(vs);
        return o;
    }
    static Outcome trap(TrapKind k, std::string msg) {
        Outcome o;
        o.kind = Kind::Trap;
        o.trap_kind = k;
        o.trap_message = std::move(msg);
        return o;
    }

    bool is_trap() const { return kind == Kind::Trap; }
    bool same_observable(const Outcome& other) const {
        if (kind != other.kind) return false;
        if (is_trap()) return trap_kind == other.trap_kind;
        return values == other.values;
    }
};

std::string to_string(const Outcome& o);

}  // namespace wasmk
