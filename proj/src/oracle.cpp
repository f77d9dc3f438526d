#include "wasmk/oracle.hpp"

#include <cmath>
#include <cstring>
#include <iostream>

namespace wasmk {

namespace {

using K = OTerm::K;

bool is_const(Op op) {
    return op == Op::I32Const || op == Op::I64Const || op == Op::F32Const ||
           op == Op::F64Const;
}

bool is_value(const OTerm& t) { return t.kind == K::Ins && is_const(t.ins.op); }

Value val_of(const OTerm& t) {
    switch (t.ins.op) {
    case Op::I32Const:
        return Value::i32(static_cast<uint32_t>(t.ins.imm));
    case Op::I64Const: return Value::i64(t.ins.imm);
    case Op::F32Const: return Value{ValueType::F32, t.ins.imm};
    default: return Value{ValueType::F64, t.ins.imm};
    }
}

OTerm const_term(Value v) {
    OTerm t;
    t.kind = K::Ins;
    switch (v.type) {
    case ValueType::I32: t.ins.op = Op::I32Const; break;
    case ValueType::I64: t.ins.op = Op::I64Const; break;
    case ValueType::F32: t.ins.op = Op::F32Const; break;
    case ValueType::F64: t.ins.op = Op::F64Const; break;
    }
    t.ins.imm = v.bits;
    return t;
}

OTerm trap_term(TrapKind k, std::string msg) {
    OTerm t;
    t.kind = K::TrapTerm;
    t.trap_kind = k;
    t.trap_msg = std::move(msg);
    return t;
}

OSeq to_terms(const std::vector<Instruction>& body) {
    OSeq out;
    out.reserve(body.size());
    for (const Instruction& ins : body) {
        OTerm t;
        t.kind = K::Ins;
        t.ins = ins;
        out.push_back(std::move(t));
    }
    return out;
}

bool all_values(const OSeq& seq) {
    for (const OTerm& t : seq)
        if (!is_value(t)) return false;
    return true;
}

// Locates the innermost non-value term: path[i] indexes into the body of
// the term at path[i-1] (path[0] indexes the top-level sequence). Returns
// false when the sequence is all values.
bool find_redex(OSeq& seq, std::vector<size_t>& path) {
    for (size_t i = 0; i < seq.size(); ++i) {
        if (is_value(seq[i])) continue;
        path.push_back(i);
        OTerm& t = seq[i];
        if (t.kind == K::Label || t.kind == K::Framed) find_redex(t.body, path);
        return true;
    }
    return false;
}

bool contains_prompt_end(const OSeq& seq) {
    for (const OTerm& t : seq) {
        if (t.kind == K::PromptEnd) return true;
        if ((t.kind == K::Label || t.kind == K::Framed) &&
            contains_prompt_end(t.body))
            return true;
    }
    return false;
}

bool replace_hole(OSeq& seq, const OTerm& replacement) {
    for (OTerm& t : seq) {
        if (t.kind == K::Hole) {
            t = replacement;
            return true;
        }
        if ((t.kind == K::Label || t.kind == K::Framed) &&
            replace_hole(t.body, replacement))
            return true;
    }
    return false;
}

size_t operand_count(Op op) {
    using enum Op;
    switch (op) {
    case I32Eqz:
    case I64Eqz:
    case I32WrapI64:
    case I64ExtendI32S:
    case I64ExtendI32U:
    case F64ConvertI64S:
    case F64ConvertI32S:
    case I32TruncF64S:
    case I64TruncF64S:
    case F64PromoteF32:
    case F32DemoteF64:
    case F32Neg:
    case F64Neg: return 1;
    default: return 2;
    }
}

int32_t s32(const Value& v) { return static_cast<int32_t>(v.as_i32()); }
int64_t s64(const Value& v) { return static_cast<int64_t>(v.as_i64()); }

Value canon32(float f) {
    if (std::isnan(f)) return Value{ValueType::F32, 0x7fc00000u};
    return Value::f32(f);
}

Value canon64(double d) {
    if (std::isnan(d)) return Value{ValueType::F64, 0x7ff8000000000000ULL};
    return Value::f64(d);
}

// Numeric rules, written against signed/float views independently of the
// fast engine's bit-level implementations.
Value apply_op(Op op, const std::vector<Value>& a) {
    using enum Op;
    auto div0 = [] { throw Trap{TrapKind::DivideByZero, "division by zero"}; };
    switch (op) {
    case I32Eqz: return Value::i32(a[0].as_i32() == 0);
    case I64Eqz: return Value::i32(a[0].as_i64() == 0);
    case I32Eq: return Value::i32(a[0].as_i32() == a[1].as_i32());
    case I32Ne: return Value::i32(a[0].as_i32() != a[1].as_i32());
    case I32LtS: return Value::i32(s32(a[0]) < s32(a[1]));
    case I32LtU: return Value::i32(a[0].as_i32() < a[1].as_i32());
    case I32GtS: return Value::i32(s32(a[0]) > s32(a[1]));
    case I32GtU: return Value::i32(a[0].as_i32() > a[1].as_i32());
    case I32LeS: return Value::i32(s32(a[0]) <= s32(a[1]));
    case I32LeU: return Value::i32(a[0].as_i32() <= a[1].as_i32());
    case I32GeS: return Value::i32(s32(a[0]) >= s32(a[1]));
    case I32GeU: return Value::i32(a[0].as_i32() >= a[1].as_i32());
    case I32Add: return Value::i32(a[0].as_i32() + a[1].as_i32());
    case I32Sub: return Value::i32(a[0].as_i32() - a[1].as_i32());
    case I32Mul: return Value::i32(a[0].as_i32() * a[1].as_i32());
    case I32DivS: {
        if (a[1].as_i32() == 0) div0();
        if (s32(a[0]) == INT32_MIN && s32(a[1]) == -1)
            throw Trap{TrapKind::DivideByZero, "integer overflow"};
        return Value::i32(static_cast<uint32_t>(s32(a[0]) / s32(a[1])));
    }
    case I32DivU:
        if (a[1].as_i32() == 0) div0();
        return Value::i32(a[0].as_i32() / a[1].as_i32());
    case I32RemS: {
        if (a[1].as_i32() == 0) div0();
        if (s32(a[0]) == INT32_MIN && s32(a[1]) == -1) return Value::i32(0);
        return Value::i32(static_cast<uint32_t>(s32(a[0]) % s32(a[1])));
    }
    case I32RemU:
        if (a[1].as_i32() == 0) div0();
        return Value::i32(a[0].as_i32() % a[1].as_i32());
    case I32And: return Value::i32(a[0].as_i32() & a[1].as_i32());
    case I32Or: return Value::i32(a[0].as_i32() | a[1].as_i32());
    case I32Xor: return Value::i32(a[0].as_i32() ^ a[1].as_i32());
    case I32Shl: return Value::i32(a[0].as_i32() << (a[1].as_i32() % 32));
    case I32ShrS:
        return Value::i32(
            static_cast<uint32_t>(s32(a[0]) >> (a[1].as_i32() % 32)));
    case I32ShrU: return Value::i32(a[0].as_i32() >> (a[1].as_i32() % 32));
    case I64Eq: return Value::i32(a[0].as_i64() == a[1].as_i64());
    case I64Ne: return Value::i32(a[0].as_i64() != a[1].as_i64());
    case I64LtS: return Value::i32(s64(a[0]) < s64(a[1]));
    case I64LtU: return Value::i32(a[0].as_i64() < a[1].as_i64());
    case I64GtS: return Value::i32(s64(a[0]) > s64(a[1]));
    case I64GtU: return Value::i32(a[0].as_i64() > a[1].as_i64());
    case I64LeS: return Value::i32(s64(a[0]) <= s64(a[1]));
    case I64LeU: return Value::i32(a[0].as_i64() <= a[1].as_i64());
    case I64GeS: return Value::i32(s64(a[0]) >= s64(a[1]));
    case I64GeU: return Value::i32(a[0].as_i64() >= a[1].as_i64());
    case I64Add: return Value::i64(a[0].as_i64() + a[1].as_i64());
    case I64Sub: return Value::i64(a[0].as_i64() - a[1].as_i64());
    case I64Mul: return Value::i64(a[0].as_i64() * a[1].as_i64());
    case I64DivS: {
        if (a[1].as_i64() == 0) div0();
        if (s64(a[0]) == INT64_MIN && s64(a[1]) == -1)
            throw Trap{TrapKind::DivideByZero, "integer overflow"};
        return Value::i64(static_cast<uint64_t>(s64(a[0]) / s64(a[1])));
    }
    case I64DivU:
        if (a[1].as_i64() == 0) div0();
        return Value::i64(a[0].as_i64() / a[1].as_i64());
    case I64RemS: {
        if (a[1].as_i64() == 0) div0();
        if (s64(a[0]) == INT64_MIN && s64(a[1]) == -1) return Value::i64(0);
        return Value::i64(static_cast<uint64_t>(s64(a[0]) % s64(a[1])));
    }
    case I64RemU:
        if (a[1].as_i64() == 0) div0();
        return Value::i64(a[0].as_i64() % a[1].as_i64());
    case I64And: return Value::i64(a[0].as_i64() & a[1].as_i64());
    case I64Or: return Value::i64(a[0].as_i64() | a[1].as_i64());
    case I64Xor: return Value::i64(a[0].as_i64() ^ a[1].as_i64());
    case I64Shl: return Value::i64(a[0].as_i64() << (a[1].as_i64() % 64));
    case I64ShrS:
        return Value::i64(
            static_cast<uint64_t>(s64(a[0]) >> (a[1].as_i64() % 64)));
    case I64ShrU: return Value::i64(a[0].as_i64() >> (a[1].as_i64() % 64));
    case F32Eq: return Value::i32(a[0].as_f32() == a[1].as_f32());
    case F32Ne: return Value::i32(a[0].as_f32() != a[1].as_f32());
    case F32Lt: return Value::i32(a[0].as_f32() < a[1].as_f32());
    case F32Gt: return Value::i32(a[0].as_f32() > a[1].as_f32());
    case F32Le: return Value::i32(a[0].as_f32() <= a[1].as_f32());
    case F32Ge: return Value::i32(a[0].as_f32() >= a[1].as_f32());
    case F32Add: return canon32(a[0].as_f32() + a[1].as_f32());
    case F32Sub: return canon32(a[0].as_f32() - a[1].as_f32());
    case F32Mul: return canon32(a[0].as_f32() * a[1].as_f32());
    case F32Div: return canon32(a[0].as_f32() / a[1].as_f32());
    case F32Neg: return Value::f32(-a[0].as_f32());
    case F64Eq: return Value::i32(a[0].as_f64() == a[1].as_f64());
    case F64Ne: return Value::i32(a[0].as_f64() != a[1].as_f64());
    case F64Lt: return Value::i32(a[0].as_f64() < a[1].as_f64());
    case F64Gt: return Value::i32(a[0].as_f64() > a[1].as_f64());
    case F64Le: return Value::i32(a[0].as_f64() <= a[1].as_f64());
    case F64Ge: return Value::i32(a[0].as_f64() >= a[1].as_f64());
    case F64Add: return canon64(a[0].as_f64() + a[1].as_f64());
    case F64Sub: return canon64(a[0].as_f64() - a[1].as_f64());
    case F64Mul: return canon64(a[0].as_f64() * a[1].as_f64());
    case F64Div: return canon64(a[0].as_f64() / a[1].as_f64());
    case F64Neg: return Value::f64(-a[0].as_f64());
    case I32WrapI64:
        return Value::i32(static_cast<uint32_t>(a[0].as_i64()));
    case I64ExtendI32S:
        return Value::i64(static_cast<uint64_t>(static_cast<int64_t>(
            s32(a[0]))));
    case I64ExtendI32U: return Value::i64(a[0].as_i32());
    case F64ConvertI64S: return Value::f64(static_cast<double>(s64(a[0])));
    case F64ConvertI32S: return Value::f64(static_cast<double>(s32(a[0])));
    case I32TruncF64S: {
        double v = a[0].as_f64();
        if (std::isnan(v) || v >= 2147483648.0 || v < -2147483649.0)
            throw Trap{TrapKind::TypeConfusion,
                       "invalid conversion to integer"};
        return Value::i32(static_cast<uint32_t>(static_cast<int32_t>(v)));
    }
    case I64TruncF64S: {
        double v = a[0].as_f64();
        if (std::isnan(v) || v >= 9223372036854775808.0 ||
            v < -9223372036854775808.0)
            throw Trap{TrapKind::TypeConfusion,
                       "invalid conversion to integer"};
        return Value::i64(static_cast<uint64_t>(static_cast<int64_t>(v)));
    }
    case F64PromoteF32:
        return Value::f64(static_cast<double>(a[0].as_f32()));
    case F32DemoteF64:
        return canon32(static_cast<float>(a[0].as_f64()));
    default:
        throw Trap{TrapKind::TypeConfusion, "unsupported numeric op"};
    }
}

std::string brief(const OTerm& t) {
    switch (t.kind) {
    case K::Label: return "label";
    case K::Framed: return "frame";
    case K::PromptEnd: return "prompt_end";
    case K::TrapTerm: return std::string("trap ") + name(t.trap_kind);
    case K::Hole: return "[_]";
    case K::Ins: {
        std::string s = keyword(t.ins.op);
        switch (t.ins.op) {
        case Op::I32Const:
        case Op::I64Const:
            s += " " + std::to_string(static_cast<int64_t>(t.ins.imm));
            break;
        case Op::Br:
        case Op::BrIf:
        case Op::Call:
        case Op::Control:
        case Op::LocalGet:
        case Op::LocalSet:
        case Op::LocalTee:
        case Op::GlobalGet:
        case Op::GlobalSet:
            s += " " + std::to_string(t.ins.imm);
            break;
        default: break;
        }
        return s;
    }
    }
    return "?";
}

void splice(OSeq& seq, size_t start, size_t count, OSeq replacement) {
    seq.erase(seq.begin() + start, seq.begin() + start + count);
    seq.insert(seq.begin() + start,
               std::make_move_iterator(replacement.begin()),
               std::make_move_iterator(replacement.end()));
}

std::vector<Value> values_before(const OSeq& seq, size_t idx, size_t n) {
    if (idx < n)
        throw Trap{TrapKind::TypeConfusion, "operand stack underflow"};
    std::vector<Value> out;
    out.reserve(n);
    for (size_t i = idx - n; i < idx; ++i) {
        if (!is_value(seq[i]))
            throw Trap{TrapKind::TypeConfusion, "operand is not a value"};
        out.push_back(val_of(seq[i]));
    }
    return out;
}

uint8_t* mem_at(OracleStore& store, uint32_t addr, uint32_t offset,
                size_t width) {
    uint64_t eff = uint64_t{addr} + offset;
    if (eff + width > store.instance.memory.size())
        throw Trap{TrapKind::MemoryOutOfBounds,
                   "memory access at " + std::to_string(eff) +
                       " out of bounds"};
    return store.instance.memory.data() + eff;
}

}  // namespace

bool oracle_terminal(const OracleConfig& config) {
    if (config.terms.size() == 1 && config.terms[0].kind == K::TrapTerm)
        return true;
    return all_values(config.terms);
}

std::optional<std::vector<ValueType>> type_configuration(
    OracleStore& store, const OracleConfig& config) {
    size_t depth = store.pstack.depth();
    std::optional<size_t> primary;  // topmost context with non-nil root
    for (size_t i = depth; i-- > 0;) {
        if (store.pstack.context(i).root) {
            primary = i;
            break;
        }
    }
    if (!primary) return config.cur_type;  // [Root]
    if (primary == depth - 1 && contains_prompt_end(config.terms))
        return std::nullopt;  // a prompt end is pending against this root
    const auto& p = store.pstack.context(*primary);
    uint64_t idx = *p.root;
    if (store.pstack.limits().epoch_debug) idx &= kIndexMask;
    return p.ctable[idx]->type;  // [Non-Root]
}

void oracle_step(OracleStore& store, OracleConfig& config,
                 std::string* rule_out, std::string* redex_out) {
    auto set_rule = [&](const std::string& r) {
        if (rule_out) *rule_out = r;
    };
    try {
        std::vector<size_t> path;
        if (!find_redex(config.terms, path)) return;
        // navigate, keeping the enclosing sequences and innermost locals
        std::vector<OSeq*> seqs(path.size());
        std::vector<OTerm*> chain(path.size());
        OSeq* seq = &config.terms;
        std::vector<Value>* locals = &config.locals;
        const FuncType* frame_type =
            &store.instance.func_type(config.entry_func);
        for (size_t d = 0; d < path.size(); ++d) {
            seqs[d] = seq;
            OTerm& t = (*seq)[path[d]];
            chain[d] = &t;
            if (t.kind == K::Framed) {
                locals = &t.locals;
                frame_type = &store.instance.func_type(t.func_index);
            }
            seq = &t.body;
        }
        size_t depth = path.size() - 1;
        OSeq& s = *seqs[depth];
        size_t idx = path[depth];
        OTerm& t = *chain[depth];
        if (redex_out) *redex_out = brief(t);

        // Unwinds to the target of a branch with index k: either a label
        // in the current frame or the frame boundary itself (the implicit
        // function-level label).
        auto do_br = [&](uint64_t k) {
            std::vector<Value> vals;
            for (size_t d2 = depth; d2-- > 0;) {
                OTerm& c = *chain[d2];
                if (c.kind == K::Framed) break;
                if (c.kind != K::Label) continue;
                if (k > 0) {
                    --k;
                    continue;
                }
                if (!c.cont.empty()) {
                    // loop label: branch restarts the continuation
                    OSeq redo = c.cont;
                    splice(*seqs[d2], path[d2], 1, std::move(redo));
                } else {
                    vals = values_before(s, idx, c.arity);
                    OSeq repl;
                    for (Value v : vals) repl.push_back(const_term(v));
                    splice(*seqs[d2], path[d2], 1, std::move(repl));
                }
                return;
            }
            // function-level label: return from the innermost frame
            vals = values_before(s, idx, frame_type->results.size());
            OSeq repl;
            for (Value v : vals) repl.push_back(const_term(v));
            for (size_t d2 = depth; d2-- > 0;) {
                if (chain[d2]->kind == K::Framed) {
                    splice(*seqs[d2], path[d2], 1, std::move(repl));
                    return;
                }
            }
            config.terms = std::move(repl);  // top-level activation returns
        };

        switch (t.kind) {
        case K::TrapTerm: {
            set_rule("trap");
            OTerm only = t;
            config.terms.clear();
            config.terms.push_back(std::move(only));
            return;
        }
        case K::Label: {
            set_rule("exit-block");
            OSeq vals = std::move(t.body);
            splice(s, idx, 1, std::move(vals));
            return;
        }
        case K::Framed: {
            set_rule("exit-frame");
            OSeq vals = std::move(t.body);
            splice(s, idx, 1, std::move(vals));
            return;
        }
        case K::PromptEnd: {
            set_rule("prompt_end");
            store.pstack.prompt_end_trans();
            s.erase(s.begin() + idx);
            return;
        }
        case K::Hole:
            throw Trap{TrapKind::TypeConfusion,
                       "hole term in a running configuration"};
        case K::Ins: break;
        }

        const Instruction& ins = t.ins;
        set_rule(keyword(ins.op));
        using enum Op;
        switch (ins.op) {
        case Unreachable:
            throw Trap{TrapKind::Unreachable, "unreachable executed"};
        case Nop: s.erase(s.begin() + idx); return;
        case Drop:
            values_before(s, idx, 1);
            splice(s, idx - 1, 2, {});
            return;
        case Select: {
            std::vector<Value> a = values_before(s, idx, 3);
            OSeq repl;
            repl.push_back(const_term(a[2].as_i32() ? a[0] : a[1]));
            splice(s, idx - 3, 4, std::move(repl));
            return;
        }
        case Block: {
            OTerm label;
            label.kind = K::Label;
            label.arity = static_cast<uint32_t>(ins.block_type.results.size());
            label.body = to_terms(ins.body);
            OSeq repl;
            repl.push_back(std::move(label));
            splice(s, idx, 1, std::move(repl));
            return;
        }
        case Loop: {
            OTerm label;
            label.kind = K::Label;
            label.arity = 0;
            OTerm redo;
            redo.kind = K::Ins;
            redo.ins = ins;
            label.cont.push_back(std::move(redo));
            label.body = to_terms(ins.body);
            OSeq repl;
            repl.push_back(std::move(label));
            splice(s, idx, 1, std::move(repl));
            return;
        }
        case If: {
            std::vector<Value> c = values_before(s, idx, 1);
            OTerm label;
            label.kind = K::Label;
            label.arity = static_cast<uint32_t>(ins.block_type.results.size());
            label.body = to_terms(c[0].as_i32() ? ins.body : ins.else_body);
            OSeq repl;
            repl.push_back(std::move(label));
            splice(s, idx - 1, 2, std::move(repl));
            return;
        }
        case Prompt: {
            size_t np = ins.block_type.params.size();
            std::vector<Value> params = values_before(s, idx, np);
            store.pstack.prompt_trans();
            OTerm label;
            label.kind = K::Label;
            label.arity = static_cast<uint32_t>(ins.block_type.results.size());
            for (Value v : params) label.body.push_back(const_term(v));
            OSeq body = to_terms(ins.body);
            label.body.insert(label.body.end(),
                              std::make_move_iterator(body.begin()),
                              std::make_move_iterator(body.end()));
            OTerm pe;
            pe.kind = K::PromptEnd;
            OSeq repl;
            repl.push_back(std::move(label));
            repl.push_back(std::move(pe));
            splice(s, idx - np, np + 1, std::move(repl));
            return;
        }
        case Br: {
            uint64_t k = ins.imm;  // copy: erasing the term invalidates ins
            s.erase(s.begin() + idx);
            do_br(k);
            return;
        }
        case BrIf: {
            uint64_t k = ins.imm;
            std::vector<Value> c = values_before(s, idx, 1);
            splice(s, idx - 1, 2, {});
            idx -= 1;
            if (c[0].as_i32()) do_br(k);
            return;
        }
        case BrTable: {
            std::vector<uint32_t> targets = ins.br_targets;
            std::vector<Value> c = values_before(s, idx, 1);
            splice(s, idx - 1, 2, {});
            idx -= 1;
            uint32_t i = c[0].as_i32();
            uint32_t k =
                i < targets.size() - 1 ? targets[i] : targets.back();
            do_br(k);
            return;
        }
        case Return: {
            size_t n = frame_type->results.size();
            std::vector<Value> vals = values_before(s, idx, n);
            OSeq repl;
            for (Value v : vals) repl.push_back(const_term(v));
            for (size_t d2 = depth; d2-- > 0;) {
                if (chain[d2]->kind == K::Framed) {
                    splice(*seqs[d2], path[d2], 1, std::move(repl));
                    return;
                }
            }
            config.terms = std::move(repl);
            return;
        }
        case Call:
        case CallIndirect: {
            uint32_t fi;
            size_t extra = 0;  // operands beyond the arguments
            if (ins.op == Call) {
                fi = static_cast<uint32_t>(ins.imm);
            } else {
                std::vector<Value> iv = values_before(s, idx, 1);
                uint32_t ti = iv[0].as_i32();
                extra = 1;
                if (ti >= store.instance.table.size())
                    throw Trap{TrapKind::MemoryOutOfBounds,
                               "table index out of bounds"};
                fi = store.instance.table[ti];
                if (fi == UINT32_MAX)
                    throw Trap{TrapKind::TypeConfusion,
                               "indirect call to uninitialized table element"};
                const FuncType& expect =
                    store.instance.module->module.types[ins.imm];
                if (!(store.instance.func_type(fi) == expect))
                    throw Trap{TrapKind::TypeConfusion,
                               "indirect call signature mismatch"};
            }
            const FuncType& ft = store.instance.func_type(fi);
            size_t na = ft.params.size();
            std::vector<Value> args =
                values_before(s, idx - extra, na);
            if (store.instance.is_host(fi)) {
                const HostFunction& h = *store.instance.host_funcs[fi];
                std::vector<Value> res = h.behavior(args);
                if (res.size() != ft.results.size())
                    throw Trap{TrapKind::HostError,
                               h.name + " returned wrong arity"};
                OSeq repl;
                for (Value v : res) repl.push_back(const_term(v));
                splice(s, idx - extra - na, na + extra + 1, std::move(repl));
                return;
            }
            const FuncDecl& f = store.instance.func(fi);
            OTerm frame;
            frame.kind = K::Framed;
            frame.func_index = fi;
            frame.locals = args;
            for (ValueType lt : f.locals) frame.locals.push_back(Value{lt, 0});
            frame.body = to_terms(f.body);
            OSeq repl;
            repl.push_back(std::move(frame));
            splice(s, idx - extra - na, na + extra + 1, std::move(repl));
            return;
        }
        case LocalGet: {
            OSeq repl;
            repl.push_back(const_term((*locals)[ins.imm]));
            splice(s, idx, 1, std::move(repl));
            return;
        }
        case LocalSet: {
            std::vector<Value> v = values_before(s, idx, 1);
            (*locals)[ins.imm] = v[0];
            splice(s, idx - 1, 2, {});
            return;
        }
        case LocalTee: {
            std::vector<Value> v = values_before(s, idx, 1);
            (*locals)[ins.imm] = v[0];
            s.erase(s.begin() + idx);
            return;
        }
        case GlobalGet: {
            OSeq repl;
            repl.push_back(const_term(store.instance.globals[ins.imm]));
            splice(s, idx, 1, std::move(repl));
            return;
        }
        case GlobalSet: {
            std::vector<Value> v = values_before(s, idx, 1);
            store.instance.globals[ins.imm] = v[0];
            splice(s, idx - 1, 2, {});
            return;
        }
        case I32Load:
        case I64Load:
        case F32Load:
        case F64Load: {
            std::vector<Value> a = values_before(s, idx, 1);
            size_t width =
                ins.op == I32Load || ins.op == F32Load ? 4 : 8;
            uint8_t* p =
                mem_at(store, a[0].as_i32(), ins.mem_offset, width);
            uint64_t bits = 0;
            std::memcpy(&bits, p, width);
            ValueType vt = ins.op == I32Load   ? ValueType::I32
                           : ins.op == I64Load ? ValueType::I64
                           : ins.op == F32Load ? ValueType::F32
                                               : ValueType::F64;
            OSeq repl;
            repl.push_back(const_term(Value{vt, bits}));
            splice(s, idx - 1, 2, std::move(repl));
            return;
        }
        case I32Store:
        case I64Store:
        case F32Store:
        case F64Store: {
            std::vector<Value> a = values_before(s, idx, 2);
            size_t width =
                ins.op == I32Store || ins.op == F32Store ? 4 : 8;
            uint8_t* p =
                mem_at(store, a[0].as_i32(), ins.mem_offset, width);
            uint64_t bits = a[1].bits;
            std::memcpy(p, &bits, width);
            splice(s, idx - 2, 3, {});
            return;
        }
        case Control: {
            std::vector<Value> v = values_before(s, idx, 1);
            auto recorded = type_configuration(store, config);
            // clone the configuration with a hole at the captured redex
            OracleConfig clone = config;
            OSeq* cs = &clone.terms;
            for (size_t d = 0; d + 1 < path.size(); ++d)
                cs = &(*cs)[path[d]].body;
            OTerm hole;
            hole.kind = K::Hole;
            OSeq hseq;
            hseq.push_back(std::move(hole));
            splice(*cs, idx - 1, 2, std::move(hseq));
            ContinuationEntry<OCtx> entry;
            entry.ctx = OCtx{std::move(clone.locals), clone.entry_func,
                             clone.cur_type, std::move(clone.terms)};
            entry.type = recorded ? *recorded : config.cur_type;
            uint64_t kappa = store.pstack.control_trans(std::move(entry));
            OTerm call;
            call.kind = K::Ins;
            call.ins.op = Op::Call;
            call.ins.imm = ins.imm;  // the handler
            config.locals.clear();
            config.terms.clear();
            config.terms.push_back(const_term(Value::i64(kappa)));
            config.terms.push_back(const_term(v[0]));
            config.terms.push_back(std::move(call));
            config.terms.push_back(trap_term(
                TrapKind::HandlerReturned, "control handler returned "
                                           "normally"));
            return;
        }
        case Restore: {
            std::vector<Value> a = values_before(s, idx, 2);
            ContinuationEntry<OCtx> entry =
                store.pstack.restore_trans(a[0].as_i64());
            config.locals = std::move(entry.ctx.locals);
            config.entry_func = entry.ctx.entry_func;
            config.cur_type = entry.type;
            config.terms = std::move(entry.ctx.terms);
            if (!replace_hole(config.terms, const_term(a[1])))
                throw Trap{TrapKind::TypeConfusion,
                           "restored context has no hole"};
            return;
        }
        case ContinuationCopy: {
            std::vector<Value> a = values_before(s, idx, 1);
            uint64_t kappa2 = store.pstack.copy_trans(a[0].as_i64());
            OSeq repl;
            repl.push_back(const_term(Value::i64(kappa2)));
            splice(s, idx - 1, 2, std::move(repl));
            return;
        }
        case ContinuationDelete: {
            std::vector<Value> a = values_before(s, idx, 1);
            store.pstack.delete_trans(a[0].as_i64());
            splice(s, idx - 1, 2, {});
            return;
        }
        default: {
            size_t n = operand_count(ins.op);
            std::vector<Value> a = values_before(s, idx, n);
            Value r = apply_op(ins.op, a);
            OSeq repl;
            repl.push_back(const_term(r));
            splice(s, idx - n, n + 1, std::move(repl));
            return;
        }
        }
    } catch (const Trap& tr) {
        set_rule("trap");
        config.terms.clear();
        config.terms.push_back(trap_term(tr.kind, tr.message));
    }
}

OracleOutcome oracle_invoke(OracleStore& store,
                            const std::string& export_name,
                            std::vector<Value> args,
                            const OracleOptions& options) {
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

    OracleOutcome out;
    if (store.instance.is_host(*fi)) {
        // degenerate case: exported import; run the host body directly
        try {
            std::vector<Value> res =
                store.instance.host_funcs[*fi]->behavior(args);
            store.pstack.prompt_end_trans();
            out.outcome = Outcome::ok(std::move(res));
        } catch (const Trap& t) {
            store.pstack.truncate(base_depth);
            out.outcome = Outcome::trap(t.kind, t.message);
        }
        return out;
    }

    OracleConfig config;
    config.entry_func = *fi;
    config.cur_type = ft.results;
    const FuncDecl& f = store.instance.func(*fi);
    config.locals = std::move(args);
    for (ValueType lt : f.locals) config.locals.push_back(Value{lt, 0});
    config.terms = to_terms(f.body);

    std::string rule, redex;
    while (!oracle_terminal(config)) {
        if (out.steps >= options.fuel) {
            store.pstack.truncate(base_depth);
            out.out_of_fuel = true;
            out.outcome =
                Outcome::trap(TrapKind::HostError, "out of fuel");
            return out;
        }
        std::optional<std::vector<ValueType>> before;
        if (options.check_preservation)
            before = type_configuration(store, config);
        oracle_step(store, config, &rule, &redex);
        ++out.steps;
        if (options.trace) {
            std::string line = "step " + std::to_string(out.steps) + ": " +
                               rule + ": " + redex + "\n";
            if (options.trace_sink)
                *options.trace_sink += line;
            else
                std::cout << line;
        }
        if (options.check_preservation && !oracle_terminal(config)) {
            auto after = type_configuration(store, config);
            if (before != after)
                throw std::logic_error(
                    "preservation violated at step " +
                    std::to_string(out.steps) + " (" + rule + ")");
        }
    }

    if (config.terms.size() == 1 && config.terms[0].kind == OTerm::K::TrapTerm) {
        store.pstack.truncate(base_depth);
        out.outcome = Outcome::trap(config.terms[0].trap_kind,
                                    config.terms[0].trap_msg);
        return out;
    }
    std::vector<Value> results;
    for (const OTerm& t : config.terms) results.push_back(val_of(t));
    try {
        store.pstack.prompt_end_trans();
        out.outcome = Outcome::ok(std::move(results));
    } catch (const Trap& t) {
        store.pstack.truncate(base_depth);
        out.outcome = Outcome::trap(t.kind, t.message);
    }
    return out;
}

}  // namespace wasmk
