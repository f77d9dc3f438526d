#include "wasmk/interpreter.hpp"

#include <cmath>
#include <cstring>
#include <limits>

namespace wasmk {

namespace {

uint64_t canon_f64(double v) {
    if (std::isnan(v)) return 0x7ff8000000000000ULL;
    uint64_t b;
    std::memcpy(&b, &v, 8);
    return b;
}

uint64_t canon_f32(float v) {
    if (std::isnan(v)) return 0x7fc00000u;
    uint32_t b;
    std::memcpy(&b, &v, 4);
    return b;
}

class Machine {
public:
    Machine(FastStore& store) : store_(store) {}

    std::vector<Value> run(uint32_t func_index, std::vector<Value> args) {
        push_call(func_index, std::move(args));
        loop();
        return std::move(results_);
    }

private:
    FastStore& store_;
    std::vector<FastFrame> frames_;
    std::vector<Value> results_;

    const Instance& inst() const { return store_.instance; }

    Value pop() {
        auto& st = frames_.back().stack;
        if (st.empty())
            throw Trap{TrapKind::TypeConfusion, "operand stack underflow"};
        Value v = st.back();
        st.pop_back();
        return v;
    }

    Value pop(ValueType t) {
        Value v = pop();
        if (v.type != t)
            throw Trap{TrapKind::TypeConfusion,
                       std::string("expected ") + name(t) + " on stack, found " +
                           name(v.type)};
        return v;
    }

    void push(Value v) { frames_.back().stack.push_back(v); }

    std::vector<Value> take(size_t n) {
        auto& st = frames_.back().stack;
        if (st.size() < n)
            throw Trap{TrapKind::TypeConfusion, "operand stack underflow"};
        std::vector<Value> out(st.end() - n, st.end());
        st.resize(st.size() - n);
        return out;
    }

    void push_call(uint32_t func_index, std::vector<Value> args) {
        const FuncDecl& f = inst().func(func_index);
        FastFrame fr;
        fr.func_index = func_index;
        fr.locals = std::move(args);
        for (ValueType t : f.locals) fr.locals.push_back(Value{t, 0});
        fr.blocks.push_back({&f.body, 0, 0,
                             static_cast<uint32_t>(
                                 inst().func_type(func_index).results.size()),
                             false, false});
        frames_.push_back(std::move(fr));
    }

    void call_host(const HostFunction& h) {
        std::vector<Value> args = take(h.type.params.size());
        std::vector<Value> res = h.behavior(args);
        if (res.size() != h.type.results.size())
            throw Trap{TrapKind::HostError,
                       h.name + " returned wrong arity"};
        for (size_t i = 0; i < res.size(); ++i) {
            if (res[i].type != h.type.results[i])
                throw Trap{TrapKind::HostError,
                           h.name + " returned wrong type"};
            push(res[i]);
        }
    }

    void call(uint32_t func_index) {
        if (inst().is_host(func_index)) {
            call_host(*inst().host_funcs[func_index]);
        } else {
            std::vector<Value> args =
                take(inst().func_type(func_index).params.size());
            push_call(func_index, std::move(args));
        }
    }

    // Function return with the given result values.
    void ret(std::vector<Value> vals) {
        frames_.pop_back();
        if (frames_.empty()) {
            results_ = std::move(vals);
            return;
        }
        for (Value v : vals) frames_.back().stack.push_back(v);
    }

    void do_br(uint64_t k) {
        FastFrame& fr = frames_.back();
        size_t tidx = fr.blocks.size() - 1 - k;
        FastFrame::Block t = fr.blocks[tidx];
        if (t.is_loop) {
            fr.stack.resize(t.stack_base);
            fr.blocks.resize(tidx + 1);
            fr.blocks.back().pc = 0;
            return;
        }
        std::vector<Value> vals = take(t.arity);
        if (tidx == 0) {
            ret(std::move(vals));
            return;
        }
        fr.stack.resize(t.stack_base);
        for (Value v : vals) fr.stack.push_back(v);
        if (t.is_prompt) store_.pstack.prompt_end_trans();
        fr.blocks.resize(tidx);
    }

    uint8_t* mem_at(uint32_t addr, uint32_t offset, size_t width) {
        uint64_t eff = uint64_t{addr} + offset;
        if (eff + width > inst().memory.size())
            throw Trap{TrapKind::MemoryOutOfBounds,
                       "memory access at " + std::to_string(eff) +
                           " out of bounds"};
        return const_cast<uint8_t*>(inst().memory.data()) + eff;
    }

    template <class F>
    void bin32(F f) {
        uint32_t b = pop(ValueType::I32).as_i32();
        uint32_t a = pop(ValueType::I32).as_i32();
        push(Value::i32(f(a, b)));
    }

    template <class F>
    void bin64(F f) {
        uint64_t b = pop(ValueType::I64).as_i64();
        uint64_t a = pop(ValueType::I64).as_i64();
        push(Value::i64(f(a, b)));
    }

    template <class F>
    void rel64(F f) {
        uint64_t b = pop(ValueType::I64).as_i64();
        uint64_t a = pop(ValueType::I64).as_i64();
        push(Value::i32(f(a, b) ? 1 : 0));
    }

    template <class F>
    void binf32(F f) {
        float b = pop(ValueType::F32).as_f32();
        float a = pop(ValueType::F32).as_f32();
        push(Value{ValueType::F32, canon_f32(f(a, b))});
    }

    template <class F>
    void binf64(F f) {
        double b = pop(ValueType::F64).as_f64();
        double a = pop(ValueType::F64).as_f64();
        push(Value{ValueType::F64, canon_f64(f(a, b))});
    }

    template <class F>
    void relf32(F f) {
        float b = pop(ValueType::F32).as_f32();
        float a = pop(ValueType::F32).as_f32();
        push(Value::i32(f(a, b) ? 1 : 0));
    }

    template <class F>
    void relf64(F f) {
        double b = pop(ValueType::F64).as_f64();
        double a = pop(ValueType::F64).as_f64();
        push(Value::i32(f(a, b) ? 1 : 0));
    }

    void loop() {
        while (!frames_.empty()) {
            FastFrame& fr = frames_.back();
            if (fr.func_index == FastFrame::kTrapSentinel)
                throw Trap{TrapKind::HandlerReturned,
                           "control handler returned normally"};
            FastFrame::Block& b = fr.blocks.back();
            if (b.pc >= b.body->size()) {
                if (fr.blocks.size() == 1) {
                    ret(take(b.arity));
                    continue;
                }
                std::vector<Value> vals = take(b.arity);
                fr.stack.resize(b.stack_base);
                for (Value v : vals) fr.stack.push_back(v);
                if (b.is_prompt) store_.pstack.prompt_end_trans();
                fr.blocks.pop_back();
                continue;
            }
            exec((*b.body)[b.pc++]);
        }
    }

    void exec(const Instruction& ins) {
        using enum Op;
        switch (ins.op) {
        case Unreachable:
            throw Trap{TrapKind::Unreachable, "unreachable executed"};
        case Nop: break;
        case Drop: pop(); break;
        case Select: {
            uint32_t c = pop(ValueType::I32).as_i32();
            Value b = pop();
            Value a = pop();
            push(c ? a : b);
            break;
        }
        case Block:
        case Loop: {
            FastFrame& fr = frames_.back();
            fr.blocks.push_back(
                {&ins.body, 0, fr.stack.size(),
                 static_cast<uint32_t>(ins.block_type.results.size()),
                 ins.op == Loop, false});
            break;
        }
        case If: {
            uint32_t c = pop(ValueType::I32).as_i32();
            FastFrame& fr = frames_.back();
            fr.blocks.push_back(
                {c ? &ins.body : &ins.else_body, 0, fr.stack.size(),
                 static_cast<uint32_t>(ins.block_type.results.size()), false,
                 false});
            break;
        }
        case Prompt: {
            std::vector<Value> params = take(ins.block_type.params.size());
            store_.pstack.prompt_trans();
            FastFrame& fr = frames_.back();
            fr.blocks.push_back(
                {&ins.body, 0, fr.stack.size(),
                 static_cast<uint32_t>(ins.block_type.results.size()), false,
                 true});
            for (Value v : params) fr.stack.push_back(v);
            break;
        }
        case Br: do_br(ins.imm); break;
        case BrIf:
            if (pop(ValueType::I32).as_i32()) do_br(ins.imm);
            break;
        case BrTable: {
            uint32_t i = pop(ValueType::I32).as_i32();
            uint32_t k = i < ins.br_targets.size() - 1
                             ? ins.br_targets[i]
                             : ins.br_targets.back();
            do_br(k);
            break;
        }
        case Return: {
            const FuncType& ft = inst().func_type(frames_.back().func_index);
            ret(take(ft.results.size()));
            break;
        }
        case Call: call(static_cast<uint32_t>(ins.imm)); break;
        case CallIndirect: {
            uint32_t i = pop(ValueType::I32).as_i32();
            if (i >= inst().table.size())
                throw Trap{TrapKind::MemoryOutOfBounds,
                           "table index out of bounds"};
            uint32_t fi = inst().table[i];
            if (fi == UINT32_MAX)
                throw Trap{TrapKind::TypeConfusion,
                           "indirect call to uninitialized table element"};
            const FuncType& expect = inst().module->module.types[ins.imm];
            if (!(inst().func_type(fi) == expect))
                throw Trap{TrapKind::TypeConfusion,
                           "indirect call signature mismatch"};
            call(fi);
            break;
        }
        case LocalGet: push(frames_.back().locals[ins.imm]); break;
        case LocalSet: frames_.back().locals[ins.imm] = pop(); break;
        case LocalTee: {
            Value v = pop();
            frames_.back().locals[ins.imm] = v;
            push(v);
            break;
        }
        case GlobalGet: push(store_.instance.globals[ins.imm]); break;
        case GlobalSet: store_.instance.globals[ins.imm] = pop(); break;
        case I32Load: {
            uint32_t a = pop(ValueType::I32).as_i32();
            uint32_t v;
            std::memcpy(&v, mem_at(a, ins.mem_offset, 4), 4);
            push(Value::i32(v));
            break;
        }
        case I64Load: {
            uint32_t a = pop(ValueType::I32).as_i32();
            uint64_t v;
            std::memcpy(&v, mem_at(a, ins.mem_offset, 8), 8);
            push(Value::i64(v));
            break;
        }
        case F32Load: {
            uint32_t a = pop(ValueType::I32).as_i32();
            uint32_t v;
            std::memcpy(&v, mem_at(a, ins.mem_offset, 4), 4);
            push(Value{ValueType::F32, v});
            break;
        }
        case F64Load: {
            uint32_t a = pop(ValueType::I32).as_i32();
            uint64_t v;
            std::memcpy(&v, mem_at(a, ins.mem_offset, 8), 8);
            push(Value{ValueType::F64, v});
            break;
        }
        case I32Store: {
            uint32_t v = pop(ValueType::I32).as_i32();
            uint32_t a = pop(ValueType::I32).as_i32();
            std::memcpy(mem_at(a, ins.mem_offset, 4), &v, 4);
            break;
        }
        case I64Store: {
            uint64_t v = pop(ValueType::I64).as_i64();
            uint32_t a = pop(ValueType::I32).as_i32();
            std::memcpy(mem_at(a, ins.mem_offset, 8), &v, 8);
            break;
        }
        case F32Store: {
            uint32_t v = static_cast<uint32_t>(pop(ValueType::F32).bits);
            uint32_t a = pop(ValueType::I32).as_i32();
            std::memcpy(mem_at(a, ins.mem_offset, 4), &v, 4);
            break;
        }
        case F64Store: {
            uint64_t v = pop(ValueType::F64).bits;
            uint32_t a = pop(ValueType::I32).as_i32();
            std::memcpy(mem_at(a, ins.mem_offset, 8), &v, 8);
            break;
        }
        case I32Const: push(Value::i32(static_cast<uint32_t>(ins.imm))); break;
        case I64Const: push(Value::i64(ins.imm)); break;
        case F32Const: push(Value{ValueType::F32, ins.imm}); break;
        case F64Const: push(Value{ValueType::F64, ins.imm}); break;
        case I32Eqz: push(Value::i32(pop(ValueType::I32).as_i32() == 0)); break;
        case I64Eqz: push(Value::i32(pop(ValueType::I64).as_i64() == 0)); break;
        case I32Eq: bin32([](uint32_t a, uint32_t b) { return a == b; }); break;
        case I32Ne: bin32([](uint32_t a, uint32_t b) { return a != b; }); break;
        case I32LtS:
            bin32([](uint32_t a, uint32_t b) {
                return static_cast<int32_t>(a) < static_cast<int32_t>(b);
            });
            break;
        case I32LtU: bin32([](uint32_t a, uint32_t b) { return a < b; }); break;
        case I32GtS:
            bin32([](uint32_t a, uint32_t b) {
                return static_cast<int32_t>(a) > static_cast<int32_t>(b);
            });
            break;
        case I32GtU: bin32([](uint32_t a, uint32_t b) { return a > b; }); break;
        case I32LeS:
            bin32([](uint32_t a, uint32_t b) {
                return static_cast<int32_t>(a) <= static_cast<int32_t>(b);
            });
            break;
        case I32LeU:
            bin32([](uint32_t a, uint32_t b) { return a <= b; });
            break;
        case I32GeS:
            bin32([](uint32_t a, uint32_t b) {
                return static_cast<int32_t>(a) >= static_cast<int32_t>(b);
            });
            break;
        case I32GeU:
            bin32([](uint32_t a, uint32_t b) { return a >= b; });
            break;
        case I32Add: bin32([](uint32_t a, uint32_t b) { return a + b; }); break;
        case I32Sub: bin32([](uint32_t a, uint32_t b) { return a - b; }); break;
        case I32Mul: bin32([](uint32_t a, uint32_t b) { return a * b; }); break;
        case I32DivS:
            bin32([](uint32_t a, uint32_t b) -> uint32_t {
                if (b == 0)
                    throw Trap{TrapKind::DivideByZero, "division by zero"};
                if (a == 0x80000000u && b == 0xffffffffu)
                    throw Trap{TrapKind::DivideByZero, "integer overflow"};
                return static_cast<uint32_t>(static_cast<int32_t>(a) /
                                             static_cast<int32_t>(b));
            });
            break;
        case I32DivU:
            bin32([](uint32_t a, uint32_t b) -> uint32_t {
                if (b == 0)
                    throw Trap{TrapKind::DivideByZero, "division by zero"};
                return a / b;
            });
            break;
        case I32RemS:
            bin32([](uint32_t a, uint32_t b) -> uint32_t {
                if (b == 0)
                    throw Trap{TrapKind::DivideByZero, "division by zero"};
                if (a == 0x80000000u && b == 0xffffffffu) return 0;
                return static_cast<uint32_t>(static_cast<int32_t>(a) %
                                             static_cast<int32_t>(b));
            });
            break;
        case I32RemU:
            bin32([](uint32_t a, uint32_t b) -> uint32_t {
                if (b == 0)
                    throw Trap{TrapKind::DivideByZero, "division by zero"};
                return a % b;
            });
            break;
        case I32And: bin32([](uint32_t a, uint32_t b) { return a & b; }); break;
        case I32Or: bin32([](uint32_t a, uint32_t b) { return a | b; }); break;
        case I32Xor: bin32([](uint32_t a, uint32_t b) { return a ^ b; }); break;
        case I32Shl:
            bin32([](uint32_t a, uint32_t b) { return a << (b & 31); });
            break;
        case I32ShrS:
            bin32([](uint32_t a, uint32_t b) {
                return static_cast<uint32_t>(static_cast<int32_t>(a) >>
                                             (b & 31));
            });
            break;
        case I32ShrU:
            bin32([](uint32_t a, uint32_t b) { return a >> (b & 31); });
            break;
        case I64Eq: rel64([](uint64_t a, uint64_t b) { return a == b; }); break;
        case I64Ne: rel64([](uint64_t a, uint64_t b) { return a != b; }); break;
        case I64LtS:
            rel64([](uint64_t a, uint64_t b) {
                return static_cast<int64_t>(a) < static_cast<int64_t>(b);
            });
            break;
        case I64LtU: rel64([](uint64_t a, uint64_t b) { return a < b; }); break;
        case I64GtS:
            rel64([](uint64_t a, uint64_t b) {
                return static_cast<int64_t>(a) > static_cast<int64_t>(b);
            });
            break;
        case I64GtU: rel64([](uint64_t a, uint64_t b) { return a > b; }); break;
        case I64LeS:
            rel64([](uint64_t a, uint64_t b) {
                return static_cast<int64_t>(a) <= static_cast<int64_t>(b);
            });
            break;
        case I64LeU:
            rel64([](uint64_t a, uint64_t b) { return a <= b; });
            break;
        case I64GeS:
            rel64([](uint64_t a, uint64_t b) {
                return static_cast<int64_t>(a) >= static_cast<int64_t>(b);
            });
            break;
        case I64GeU:
            rel64([](uint64_t a, uint64_t b) { return a >= b; });
            break;
        case I64Add: bin64([](uint64_t a, uint64_t b) { return a + b; }); break;
        case I64Sub: bin64([](uint64_t a, uint64_t b) { return a - b; }); break;
        case I64Mul: bin64([](uint64_t a, uint64_t b) { return a * b; }); break;
        case I64DivS:
            bin64([](uint64_t a, uint64_t b) -> uint64_t {
                if (b == 0)
                    throw Trap{TrapKind::DivideByZero, "division by zero"};
                if (a == 0x8000000000000000ULL && b == UINT64_MAX)
                    throw Trap{TrapKind::DivideByZero, "integer overflow"};
                return static_cast<uint64_t>(static_cast<int64_t>(a) /
                                             static_cast<int64_t>(b));
            });
            break;
        case I64DivU:
            bin64([](uint64_t a, uint64_t b) -> uint64_t {
                if (b == 0)
                    throw Trap{TrapKind::DivideByZero, "division by zero"};
                return a / b;
            });
            break;
        case I64RemS:
            bin64([](uint64_t a, uint64_t b) -> uint64_t {
                if (b == 0)
                    throw Trap{TrapKind::DivideByZero, "division by zero"};
                if (a == 0x8000000000000000ULL && b == UINT64_MAX) return 0;
                return static_cast<uint64_t>(static_cast<int64_t>(a) %
                                             static_cast<int64_t>(b));
            });
            break;
        case I64RemU:
            bin64([](uint64_t a, uint64_t b) -> uint64_t {
                if (b == 0)
                    throw Trap{TrapKind::DivideByZero, "division by zero"};
                return a % b;
            });
            break;
        case I64And: bin64([](uint64_t a, uint64_t b) { return a & b; }); break;
        case I64Or: bin64([](uint64_t a, uint64_t b) { return a | b; }); break;
        case I64Xor: bin64([](uint64_t a, uint64_t b) { return a ^ b; }); break;
        case I64Shl:
            bin64([](uint64_t a, uint64_t b) { return a << (b & 63); });
            break;
        case I64ShrS:
            bin64([](uint64_t a, uint64_t b) {
                return static_cast<uint64_t>(static_cast<int64_t>(a) >>
                                             (b & 63));
            });
            break;
        case I64ShrU:
            bin64([](uint64_t a, uint64_t b) { return a >> (b & 63); });
            break;
        case F32Eq: relf32([](float a, float b) { return a == b; }); break;
        case F32Ne: relf32([](float a, float b) { return a != b; }); break;
        case F32Lt: relf32([](float a, float b) { return a < b; }); break;
        case F32Gt: relf32([](float a, float b) { return a > b; }); break;
        case F32Le: relf32([](float a, float b) { return a <= b; }); break;
        case F32Ge: relf32([](float a, float b) { return a >= b; }); break;
        case F32Add: binf32([](float a, float b) { return a + b; }); break;
        case F32Sub: binf32([](float a, float b) { return a - b; }); break;
        case F32Mul: binf32([](float a, float b) { return a * b; }); break;
        case F32Div: binf32([](float a, float b) { return a / b; }); break;
        case F32Neg: {
            float a = pop(ValueType::F32).as_f32();
            push(Value::f32(-a));
            break;
        }
        case F64Eq: relf64([](double a, double b) { return a == b; }); break;
        case F64Ne: relf64([](double a, double b) { return a != b; }); break;
        case F64Lt: relf64([](double a, double b) { return a < b; }); break;
        case F64Gt: relf64([](double a, double b) { return a > b; }); break;
        case F64Le: relf64([](double a, double b) { return a <= b; }); break;
        case F64Ge: relf64([](double a, double b) { return a >= b; }); break;
        case F64Add: binf64([](double a, double b) { return a + b; }); break;
        case F64Sub: binf64([](double a, double b) { return a - b; }); break;
        case F64Mul: binf64([](double a, double b) { return a * b; }); break;
        case F64Div: binf64([](double a, double b) { return a / b; }); break;
        case F64Neg: {
            double a = pop(ValueType::F64).as_f64();
            push(Value::f64(-a));
            break;
        }
        case I32WrapI64:
            push(Value::i32(
                static_cast<uint32_t>(pop(ValueType::I64).as_i64())));
            break;
        case I64ExtendI32S:
            push(Value::i64(static_cast<uint64_t>(static_cast<int64_t>(
                static_cast<int32_t>(pop(ValueType::I32).as_i32())))));
            break;
        case I64ExtendI32U:
            push(Value::i64(pop(ValueType::I32).as_i32()));
            break;
        case F64ConvertI64S:
            push(Value::f64(static_cast<double>(
                static_cast<int64_t>(pop(ValueType::I64).as_i64()))));
            break;
        case F64ConvertI32S:
            push(Value::f64(static_cast<double>(
                static_cast<int32_t>(pop(ValueType::I32).as_i32()))));
            break;
        case I32TruncF64S: {
            double v = pop(ValueType::F64).as_f64();
            if (std::isnan(v) || v >= 2147483648.0 || v < -2147483649.0)
                throw Trap{TrapKind::TypeConfusion,
                           "invalid conversion to integer"};
            push(Value::i32(static_cast<uint32_t>(static_cast<int32_t>(v))));
            break;
        }
        case I64TruncF64S: {
            double v = pop(ValueType::F64).as_f64();
            if (std::isnan(v) || v >= 9223372036854775808.0 ||
                v < -9223372036854775808.0)
                throw Trap{TrapKind::TypeConfusion,
                           "invalid conversion to integer"};
            push(Value::i64(static_cast<uint64_t>(static_cast<int64_t>(v))));
            break;
        }
        case F64PromoteF32:
            push(Value::f64(
                static_cast<double>(pop(ValueType::F32).as_f32())));
            break;
        case F32DemoteF64:
            push(Value{ValueType::F32,
                       canon_f32(static_cast<float>(
                           pop(ValueType::F64).as_f64()))});
            break;
        case Control: exec_control(static_cast<uint32_t>(ins.imm)); break;
        case Restore: exec_restore(); break;
        case ContinuationCopy: {
            uint64_t id = pop(ValueType::I64).as_i64();
            push(Value::i64(store_.pstack.copy_trans(id)));
            break;
        }
        case ContinuationDelete: {
            uint64_t id = pop(ValueType::I64).as_i64();
            store_.pstack.delete_trans(id);
            break;
        }
        }
    }

    // Captures the entire frame stack of this invoke, then continues on a
    // fresh stack that calls the handler with (kappa, v) over a frame that
    // traps if the handler ever returns past it.
    void exec_control(uint32_t handler_index) {
        Value v = pop(ValueType::I64);
        ContinuationEntry<FastCtx> entry;
        entry.ctx.frames = std::move(frames_);
        uint64_t kappa = store_.pstack.control_trans(std::move(entry));
        frames_.clear();
        FastFrame sentinel;
        sentinel.func_index = FastFrame::kTrapSentinel;
        frames_.push_back(std::move(sentinel));
        if (inst().is_host(handler_index)) {
            // A host handler cannot restore anything; calling it and falling
            // through to the sentinel is the only possible outcome.
            frames_.back().stack.push_back(Value::i64(kappa));
            frames_.back().stack.push_back(v);
            call_host(*inst().host_funcs[handler_index]);
        } else {
            push_call(handler_index, {Value::i64(kappa), v});
        }
    }

    // Abortive: the current frame stack is discarded and the saved one
    // reinstated with v pushed at the hole.
    void exec_restore() {
        Value v = pop(ValueType::I64);
        uint64_t kappa = pop(ValueType::I64).as_i64();
        ContinuationEntry<FastCtx> entry = store_.pstack.restore_trans(kappa);
        frames_ = std::move(entry.ctx.frames);
        frames_.back().stack.push_back(v);
    }
};

}  // namespace

Outcome invoke(FastStore& store, const std::string& export_name,
               std::vector<Value> args) {
    std::optional<uint32_t> fi = store.instance.find_export(export_name);
    if (!fi) throw std::invalid_argument("unknown export: " + export_name);
    const FuncType& ft = store.instance.func_type(*fi);
    if (args.size() != ft.params.size())
        throw std::invalid_argument("argument count mismatch for " +
                                    export_name);
    for (size_t i = 0; i < args.size(); ++i)
        if (args[i].type != ft.params[i])
            throw std::invalid_argument("argument type mismatch for " +
                                        export_name);
    size_t base_depth = store.pstack.depth();
    store.pstack.prompt_trans();  // the implicit FFI prompt
    try {
        Machine m(store);
        std::vector<Value> results = m.run(*fi, std::move(args));
        store.pstack.prompt_end_trans();
        return Outcome::ok(std::move(results));
    } catch (const Trap& t) {
        store.pstack.truncate(base_depth);
        return Outcome::trap(t.kind, t.message);
    }
}

}  // namespace wasmk
