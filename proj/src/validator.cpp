#include "wasmk/validator.hpp"

#include <optional>
#include <vector>

namespace wasmk {

namespace {

// Operand-stack type checking per function, following the standard
// validation algorithm: a stack of maybe-types plus control frames.
// Prompt scopes are boundaries in the control-frame stack; branches never
// resolve labels below the innermost boundary.
class FuncChecker {
public:
    FuncChecker(const Module& m, uint32_t func_index)
        : m_(m),
          func_index_(func_index),
          f_(m.funcs[func_index - m.imports.size()]),
          ftype_(m.types[f_.type_index]) {
        locals_ = ftype_.params;
        locals_.insert(locals_.end(), f_.locals.begin(), f_.locals.end());
    }

    void run() {
        scope_starts_.push_back(0);
        push_ctrl(ftype_.results, ftype_.results, false);
        check_seq(f_.body);
        pop_types(ftype_.results);
        if (stack_.size() != ctrls_.back().height)
            fail("values left on stack at function end");
    }

private:
    using MaybeType = std::optional<ValueType>;

    struct Ctrl {
        std::vector<ValueType> label_types;  // what br to this label expects
        std::vector<ValueType> end_types;
        size_t height;
        bool unreachable = false;
    };

    const Module& m_;
    uint32_t func_index_;
    const FuncDecl& f_;
    const FuncType& ftype_;
    std::vector<ValueType> locals_;
    std::vector<MaybeType> stack_;
    std::vector<Ctrl> ctrls_;
    std::vector<size_t> scope_starts_;  // prompt boundaries into ctrls_
    size_t ordinal_ = 0;

    [[noreturn]] void fail(const std::string& rule) const {
        std::string where = "func " + std::to_string(func_index_);
        if (!f_.name.empty()) where += " (" + f_.name + ")";
        throw ValidationError(where + ", instruction #" +
                              std::to_string(ordinal_) + ": " + rule);
    }

    void push(MaybeType t) { stack_.push_back(t); }

    MaybeType pop_any() {
        Ctrl& c = ctrls_.back();
        if (stack_.size() == c.height) {
            if (c.unreachable) return std::nullopt;
            fail("operand stack underflow");
        }
        MaybeType t = stack_.back();
        stack_.pop_back();
        return t;
    }

    void pop(ValueType expect) {
        MaybeType t = pop_any();
        if (t && *t != expect)
            fail(std::string("type mismatch: expected ") + name(expect) +
                 ", found " + name(*t));
    }

    void pop_types(const std::vector<ValueType>& ts) {
        for (auto it = ts.rbegin(); it != ts.rend(); ++it) pop(*it);
    }

    void push_types(const std::vector<ValueType>& ts) {
        for (ValueType t : ts) push(t);
    }

    void push_ctrl(std::vector<ValueType> label_types,
                   std::vector<ValueType> end_types, bool push_params = false,
                   const std::vector<ValueType>& params = {}) {
        ctrls_.push_back(
            {std::move(label_types), std::move(end_types), stack_.size()});
        if (push_params) push_types(params);
    }

    void pop_ctrl() {
        Ctrl& c = ctrls_.back();
        pop_types(c.end_types);
        if (stack_.size() != c.height)
            fail("values left on stack at block end");
        std::vector<ValueType> results = c.end_types;
        ctrls_.pop_back();
        push_types(results);
    }

    void mark_unreachable() {
        Ctrl& c = ctrls_.back();
        stack_.resize(c.height);
        c.unreachable = true;
    }

    const Ctrl& label(uint64_t k) {
        size_t visible = ctrls_.size() - scope_starts_.back();
        if (k >= visible) {
            if (k < ctrls_.size()) fail("branch escapes prompt boundary");
            fail("unknown label " + std::to_string(k));
        }
        return ctrls_[ctrls_.size() - 1 - k];
    }

    void check_seq(const std::vector<Instruction>& body) {
        for (const Instruction& ins : body) check(ins);
    }

    void check_local(uint64_t idx) {
        if (idx >= locals_.size())
            fail("unknown local " + std::to_string(idx));
    }

    void need_memory() {
        if (!m_.has_memory) fail("module has no memory");
    }

    void check(const Instruction& ins) {
        ++ordinal_;
        using enum Op;
        Op op = ins.op;
        auto in_range = [op](Op lo, Op hi) {
            return static_cast<int>(op) >= static_cast<int>(lo) &&
                   static_cast<int>(op) <= static_cast<int>(hi);
        };
        switch (op) {
        case Unreachable: mark_unreachable(); return;
        case Nop: return;
        case Drop: pop_any(); return;
        case Select: {
            pop(ValueType::I32);
            MaybeType a = pop_any();
            MaybeType b = pop_any();
            if (a && b && *a != *b) fail("select operand types differ");
            push(a ? a : b);
            return;
        }
        case Block:
        case Loop: {
            if (ins.block_type.results.size() > 1)
                fail("multi-value blocks are not supported");
            std::vector<ValueType> lt =
                op == Loop ? std::vector<ValueType>{} : ins.block_type.results;
            push_ctrl(lt, ins.block_type.results);
            check_seq(ins.body);
            pop_ctrl();
            return;
        }
        case If: {
            if (ins.block_type.results.size() > 1)
                fail("multi-value blocks are not supported");
            pop(ValueType::I32);
            if (ins.else_body.empty() && !ins.block_type.results.empty())
                fail("if with a result needs an else branch");
            push_ctrl(ins.block_type.results, ins.block_type.results);
            check_seq(ins.body);
            // re-enter for the else arm
            Ctrl c = ctrls_.back();
            pop_ctrl();
            pop_types(c.end_types);
            push_ctrl(c.label_types, c.end_types);
            check_seq(ins.else_body);
            pop_ctrl();
            return;
        }
        case Br:
            pop_types(label(ins.imm).label_types);
            mark_unreachable();
            return;
        case BrIf: {
            pop(ValueType::I32);
            const Ctrl& c = label(ins.imm);
            pop_types(c.label_types);
            push_types(c.label_types);
            return;
        }
        case BrTable: {
            pop(ValueType::I32);
            const Ctrl& dflt = label(ins.br_targets.back());
            for (uint32_t t : ins.br_targets)
                if (label(t).label_types != dflt.label_types)
                    fail("br_table targets have mismatched label types");
            pop_types(dflt.label_types);
            mark_unreachable();
            return;
        }
        case Return:
            if (scope_starts_.size() > 1)
                fail("return invalid inside prompt");
            pop_types(ftype_.results);
            mark_unreachable();
            return;
        case Call: {
            if (ins.imm >= m_.func_count())
                fail("unknown function " + std::to_string(ins.imm));
            const FuncType& ft =
                m_.func_type(static_cast<uint32_t>(ins.imm));
            pop_types(ft.params);
            push_types(ft.results);
            return;
        }
        case CallIndirect: {
            if (!m_.has_table) fail("module has no table");
            if (ins.imm >= m_.types.size())
                fail("unknown type " + std::to_string(ins.imm));
            const FuncType& ft = m_.types[ins.imm];
            pop(ValueType::I32);
            pop_types(ft.params);
            push_types(ft.results);
            return;
        }
        case LocalGet:
            check_local(ins.imm);
            push(locals_[ins.imm]);
            return;
        case LocalSet:
            check_local(ins.imm);
            pop(locals_[ins.imm]);
            return;
        case LocalTee:
            check_local(ins.imm);
            pop(locals_[ins.imm]);
            push(locals_[ins.imm]);
            return;
        case GlobalGet:
            if (ins.imm >= m_.globals.size())
                fail("unknown global " + std::to_string(ins.imm));
            push(m_.globals[ins.imm].type);
            return;
        case GlobalSet: {
            if (ins.imm >= m_.globals.size())
                fail("unknown global " + std::to_string(ins.imm));
            const GlobalDecl& g = m_.globals[ins.imm];
            if (!g.is_mutable) fail("global is immutable");
            pop(g.type);
            return;
        }
        case I32Load:
        case I64Load:
        case F32Load:
        case F64Load: {
            need_memory();
            pop(ValueType::I32);
            ValueType vt[] = {ValueType::I32, ValueType::I64, ValueType::F32,
                              ValueType::F64};
            push(vt[static_cast<int>(op) - static_cast<int>(I32Load)]);
            return;
        }
        case I32Store:
        case I64Store:
        case F32Store:
        case F64Store: {
            need_memory();
            ValueType vt[] = {ValueType::I32, ValueType::I64, ValueType::F32,
                              ValueType::F64};
            pop(vt[static_cast<int>(op) - static_cast<int>(I32Store)]);
            pop(ValueType::I32);
            return;
        }
        case I32Const: push(ValueType::I32); return;
        case I64Const: push(ValueType::I64); return;
        case F32Const: push(ValueType::F32); return;
        case F64Const: push(ValueType::F64); return;
        case I32Eqz:
            pop(ValueType::I32);
            push(ValueType::I32);
            return;
        case I64Eqz:
            pop(ValueType::I64);
            push(ValueType::I32);
            return;
        case I32WrapI64:
            pop(ValueType::I64);
            push(ValueType::I32);
            return;
        case I64ExtendI32S:
        case I64ExtendI32U:
            pop(ValueType::I32);
            push(ValueType::I64);
            return;
        case F64ConvertI64S:
            pop(ValueType::I64);
            push(ValueType::F64);
            return;
        case F64ConvertI32S:
            pop(ValueType::I32);
            push(ValueType::F64);
            return;
        case I32TruncF64S:
            pop(ValueType::F64);
            push(ValueType::I32);
            return;
        case I64TruncF64S:
            pop(ValueType::F64);
            push(ValueType::I64);
            return;
        case F64PromoteF32:
            pop(ValueType::F32);
            push(ValueType::F64);
            return;
        case F32DemoteF64:
            pop(ValueType::F64);
            push(ValueType::F32);
            return;
        case F32Neg:
            pop(ValueType::F32);
            push(ValueType::F32);
            return;
        case F64Neg:
            pop(ValueType::F64);
            push(ValueType::F64);
            return;
        case Control: {
            if (ins.imm >= m_.func_count())
                fail("unknown function " + std::to_string(ins.imm));
            const FuncType& ht =
                m_.func_type(static_cast<uint32_t>(ins.imm));
            if (ht.params != std::vector<ValueType>{ValueType::I64,
                                                    ValueType::I64} ||
                !ht.results.empty())
                fail("control handler signature must be [i64 i64] -> []");
            pop(ValueType::I64);
            push(ValueType::I64);
            return;
        }
        case Restore:
            pop(ValueType::I64);  // resume value
            pop(ValueType::I64);  // continuation ID
            mark_unreachable();
            return;
        case ContinuationCopy:
            pop(ValueType::I64);
            push(ValueType::I64);
            return;
        case ContinuationDelete: pop(ValueType::I64); return;
        case Prompt: {
            if (ins.block_type.results.size() > 1)
                fail("multi-value blocks are not supported");
            pop_types(ins.block_type.params);
            scope_starts_.push_back(ctrls_.size());
            push_ctrl(ins.block_type.results, ins.block_type.results, true,
                      ins.block_type.params);
            check_seq(ins.body);
            pop_ctrl();
            scope_starts_.pop_back();
            return;
        }
        default: break;
        }
        // remaining dense ranges: comparisons and arithmetic
        if (in_range(I32Eq, I32GeU)) {
            pop(ValueType::I32);
            pop(ValueType::I32);
            push(ValueType::I32);
        } else if (in_range(I32Add, I32ShrU)) {
            pop(ValueType::I32);
            pop(ValueType::I32);
            push(ValueType::I32);
        } else if (in_range(I64Eq, I64GeU)) {
            pop(ValueType::I64);
            pop(ValueType::I64);
            push(ValueType::I32);
        } else if (in_range(I64Add, I64ShrU)) {
            pop(ValueType::I64);
            pop(ValueType::I64);
            push(ValueType::I64);
        } else if (in_range(F32Eq, F32Ge)) {
            pop(ValueType::F32);
            pop(ValueType::F32);
            push(ValueType::I32);
        } else if (in_range(F32Add, F32Div)) {
            pop(ValueType::F32);
            pop(ValueType::F32);
            push(ValueType::F32);
        } else if (in_range(F64Eq, F64Ge)) {
            pop(ValueType::F64);
            pop(ValueType::F64);
            push(ValueType::I32);
        } else if (in_range(F64Add, F64Div)) {
            pop(ValueType::F64);
            pop(ValueType::F64);
            push(ValueType::F64);
        } else {
            fail("instruction not supported by the validator");
        }
    }
};

}  // namespace

ValidatedModule validate(Module m) {
    for (const ImportDecl& imp : m.imports)
        if (imp.type_index >= m.types.size())
            throw ValidationError("import " + imp.module_name + "." +
                                  imp.item_name + ": type index out of range");
    for (size_t i = 0; i < m.funcs.size(); ++i) {
        if (m.funcs[i].type_index >= m.types.size())
            throw ValidationError("func " +
                                  std::to_string(m.imports.size() + i) +
                                  ": type index out of range");
        if (m.types[m.funcs[i].type_index].results.size() > 1)
            throw ValidationError("func " +
                                  std::to_string(m.imports.size() + i) +
                                  ": multi-value results are not supported");
    }
    for (const ExportDecl& ex : m.exports)
        if (ex.func_index >= m.func_count())
            throw ValidationError("export " + ex.name +
                                  ": function index out of range");
    for (size_t i = 0; i < m.exports.size(); ++i)
        for (size_t j = i + 1; j < m.exports.size(); ++j)
            if (m.exports[i].name == m.exports[j].name)
                throw ValidationError("duplicate export " + m.exports[i].name);
    for (uint32_t fi : m.table)
        if (fi != UINT32_MAX && fi >= m.func_count())
            throw ValidationError("table element out of range");
    if (m.has_table && m.table.size() > m.table_size)
        throw ValidationError("table elements exceed table size");
    for (size_t i = 0; i < m.funcs.size(); ++i) {
        FuncChecker checker(m, static_cast<uint32_t>(m.imports.size() + i));
        checker.run();
    }
    return ValidatedModule{std::move(m)};
}

}  // namespace wasmk
