#include "wasmk/ast.hpp"

#include <array>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "wasmk/value.hpp"

namespace wasmk {

const char* name(ValueType t) {
    switch (t) {
    case ValueType::I32: return "i32";
    case ValueType::I64: return "i64";
    case ValueType::F32: return "f32";
    case ValueType::F64: return "f64";
    }
    return "?";
}

const char* keyword(Op op) {
    switch (op) {
    case Op::Unreachable: return "unreachable";
    case Op::Nop: return "nop";
    case Op::Drop: return "drop";
    case Op::Select: return "select";
    case Op::Block: return "block";
    case Op::Loop: return "loop";
    case Op::If: return "if";
    case Op::Br: return "br";
    case Op::BrIf: return "br_if";
    case Op::BrTable: return "br_table";
    case Op::Return: return "return";
    case Op::Call: return "call";
    case Op::CallIndirect: return "call_indirect";
    case Op::LocalGet: return "local.get";
    case Op::LocalSet: return "local.set";
    case Op::LocalTee: return "local.tee";
    case Op::GlobalGet: return "global.get";
    case Op::GlobalSet: return "global.set";
    case Op::I32Load: return "i32.load";
    case Op::I64Load: return "i64.load";
    case Op::F32Load: return "f32.load";
    case Op::F64Load: return "f64.load";
    case Op::I32Store: return "i32.store";
    case Op::I64Store: return "i64.store";
    case Op::F32Store: return "f32.store";
    case Op::F64Store: return "f64.store";
    case Op::I32Const: return "i32.const";
    case Op::I64Const: return "i64.const";
    case Op::F32Const: return "f32.const";
    case Op::F64Const: return "f64.const";
    case Op::I32Eqz: return "i32.eqz";
    case Op::I32Eq: return "i32.eq";
    case Op::I32Ne: return "i32.ne";
    case Op::I32LtS: return "i32.lt_s";
    case Op::I32LtU: return "i32.lt_u";
    case Op::I32GtS: return "i32.gt_s";
    case Op::I32GtU: return "i32.gt_u";
    case Op::I32LeS: return "i32.le_s";
    case Op::I32LeU: return "i32.le_u";
    case Op::I32GeS: return "i32.ge_s";
    case Op::I32GeU: return "i32.ge_u";
    case Op::I32Add: return "i32.add";
    case Op::I32Sub: return "i32.sub";
    case Op::I32Mul: return "i32.mul";
    case Op::I32DivS: return "i32.div_s";
    case Op::I32DivU: return "i32.div_u";
    case Op::I32RemS: return "i32.rem_s";
    case Op::I32RemU: return "i32.rem_u";
    case Op::I32And: return "i32.and";
    case Op::I32Or: return "i32.or";
    case Op::I32Xor: return "i32.xor";
    case Op::I32Shl: return "i32.shl";
    case Op::I32ShrS: return "i32.shr_s";
    case Op::I32ShrU: return "i32.shr_u";
    case Op::I64Eqz: return "i64.eqz";
    case Op::I64Eq: return "i64.eq";
    case Op::I64Ne: return "i64.ne";
    case Op::I64LtS: return "i64.lt_s";
    case Op::I64LtU: return "i64.lt_u";
    case Op::I64GtS: return "i64.gt_s";
    case Op::I64GtU: return "i64.gt_u";
    case Op::I64LeS: return "i64.le_s";
    case Op::I64LeU: return "i64.le_u";
    case Op::I64GeS: return "i64.ge_s";
    case Op::I64GeU: return "i64.ge_u";
    case Op::I64Add: return "i64.add";
    case Op::I64Sub: return "i64.sub";
    case Op::I64Mul: return "i64.mul";
    case Op::I64DivS: return "i64.div_s";
    case Op::I64DivU: return "i64.div_u";
    case Op::I64RemS: return "i64.rem_s";
    case Op::I64RemU: return "i64.rem_u";
    case Op::I64And: return "i64.and";
    case Op::I64Or: return "i64.or";
    case Op::I64Xor: return "i64.xor";
    case Op::I64Shl: return "i64.shl";
    case Op::I64ShrS: return "i64.shr_s";
    case Op::I64ShrU: return "i64.shr_u";
    case Op::F32Eq: return "f32.eq";
    case Op::F32Ne: return "f32.ne";
    case Op::F32Lt: return "f32.lt";
    case Op::F32Gt: return "f32.gt";
    case Op::F32Le: return "f32.le";
    case Op::F32Ge: return "f32.ge";
    case Op::F32Add: return "f32.add";
    case Op::F32Sub: return "f32.sub";
    case Op::F32Mul: return "f32.mul";
    case Op::F32Div: return "f32.div";
    case Op::F32Neg: return "f32.neg";
    case Op::F64Eq: return "f64.eq";
    case Op::F64Ne: return "f64.ne";
    case Op::F64Lt: return "f64.lt";
    case Op::F64Gt: return "f64.gt";
    case Op::F64Le: return "f64.le";
    case Op::F64Ge: return "f64.ge";
    case Op::F64Add: return "f64.add";
    case Op::F64Sub: return "f64.sub";
    case Op::F64Mul: return "f64.mul";
    case Op::F64Div: return "f64.div";
    case Op::F64Neg: return "f64.neg";
    case Op::I32WrapI64: return "i32.wrap_i64";
    case Op::I64ExtendI32S: return "i64.extend_i32_s";
    case Op::I64ExtendI32U: return "i64.extend_i32_u";
    case Op::F64ConvertI64S: return "f64.convert_i64_s";
    case Op::F64ConvertI32S: return "f64.convert_i32_s";
    case Op::I32TruncF64S: return "i32.trunc_f64_s";
    case Op::I64TruncF64S: return "i64.trunc_f64_s";
    case Op::F64PromoteF32: return "f64.promote_f32";
    case Op::F32DemoteF64: return "f32.demote_f64";
    case Op::Control: return "control";
    case Op::Restore: return "restore";
    case Op::ContinuationCopy: return "continuation_copy";
    case Op::ContinuationDelete: return "continuation_delete";
    case Op::Prompt: return "prompt";
    }
    return "?";
}

const FuncType& Module::func_type(uint32_t index) const {
    if (index < imports.size()) return types.at(imports[index].type_index);
    return types.at(funcs.at(index - imports.size()).type_index);
}

bool structurally_equal(const Instruction& a, const Instruction& b) {
    if (a.op != b.op || a.imm != b.imm || a.mem_offset != b.mem_offset ||
        a.block_type != b.block_type || a.br_targets != b.br_targets)
        return false;
    auto seq_eq = [](const std::vector<Instruction>& x,
                     const std::vector<Instruction>& y) {
        if (x.size() != y.size()) return false;
        for (size_t i = 0; i < x.size(); ++i)
            if (!structurally_equal(x[i], y[i])) return false;
        return true;
    };
    return seq_eq(a.body, b.body) && seq_eq(a.else_body, b.else_body);
}

bool structurally_equal(const Module& a, const Module& b) {
    if (a.types != b.types) return false;
    if (a.imports.size() != b.imports.size()) return false;
    for (size_t i = 0; i < a.imports.size(); ++i) {
        const auto& x = a.imports[i];
        const auto& y = b.imports[i];
        if (x.module_name != y.module_name || x.item_name != y.item_name ||
            x.type_index != y.type_index)
            return false;
    }
    if (a.funcs.size() != b.funcs.size()) return false;
    for (size_t i = 0; i < a.funcs.size(); ++i) {
        const auto& x = a.funcs[i];
        const auto& y = b.funcs[i];
        if (x.type_index != y.type_index || x.locals != y.locals) return false;
        if (x.body.size() != y.body.size()) return false;
        for (size_t j = 0; j < x.body.size(); ++j)
            if (!structurally_equal(x.body[j], y.body[j])) return false;
    }
    if (a.globals.size() != b.globals.size()) return false;
    for (size_t i = 0; i < a.globals.size(); ++i) {
        const auto& x = a.globals[i];
        const auto& y = b.globals[i];
        if (x.type != y.type || x.is_mutable != y.is_mutable ||
            x.init_bits != y.init_bits)
            return false;
    }
    if (a.has_table != b.has_table || a.table_size != b.table_size ||
        a.table != b.table)
        return false;
    if (a.has_memory != b.has_memory || a.memory_pages != b.memory_pages)
        return false;
    if (a.exports.size() != b.exports.size()) return false;
    for (size_t i = 0; i < a.exports.size(); ++i)
        if (a.exports[i].name != b.exports[i].name ||
            a.exports[i].func_index != b.exports[i].func_index)
            return false;
    return true;
}

namespace {

void print_indent(std::ostringstream& out, int n) {
    for (int i = 0; i < n; ++i) out << "  ";
}

std::string float_literal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print_block_type(std::ostringstream& out, const FuncType& tf) {
    for (ValueType t : tf.params) out << " (param " << name(t) << ")";
    for (ValueType t : tf.results) out << " (result " << name(t) << ")";
}

void print_seq(std::ostringstream& out, const std::vector<Instruction>& seq,
               int indent);

void print_one(std::ostringstream& out, const Instruction& ins, int indent) {
    print_indent(out, indent);
    switch (ins.op) {
    case Op::Block:
    case Op::Loop:
    case Op::Prompt:
        out << keyword(ins.op);
        print_block_type(out, ins.block_type);
        out << "\n";
        print_seq(out, ins.body, indent + 1);
        print_indent(out, indent);
        out << "end";
        break;
    case Op::If:
        out << "if";
        print_block_type(out, ins.block_type);
        out << "\n";
        print_seq(out, ins.body, indent + 1);
        if (!ins.else_body.empty()) {
            print_indent(out, indent);
            out << "else\n";
            print_seq(out, ins.else_body, indent + 1);
        }
        print_indent(out, indent);
        out << "end";
        break;
    case Op::I32Const:
        out << "i32.const " << static_cast<int32_t>(ins.imm);
        break;
    case Op::I64Const:
        out << "i64.const " << static_cast<int64_t>(ins.imm);
        break;
    case Op::F32Const:
        out << "f32.const "
            << float_literal(Value{ValueType::F32, ins.imm}.as_f32());
        break;
    case Op::F64Const:
        out << "f64.const "
            << float_literal(Value{ValueType::F64, ins.imm}.as_f64());
        break;
    case Op::Br:
    case Op::BrIf:
    case Op::LocalGet:
    case Op::LocalSet:
    case Op::LocalTee:
    case Op::GlobalGet:
    case Op::GlobalSet:
    case Op::Call:
    case Op::Control:
        out << keyword(ins.op) << " " << ins.imm;
        break;
    case Op::CallIndirect:
        out << "call_indirect (type " << ins.imm << ")";
        break;
    case Op::BrTable:
        out << "br_table";
        for (uint32_t t : ins.br_targets) out << " " << t;
        break;
    case Op::I32Load:
    case Op::I64Load:
    case Op::F32Load:
    case Op::F64Load:
    case Op::I32Store:
    case Op::I64Store:
    case Op::F32Store:
    case Op::F64Store:
        out << keyword(ins.op);
        if (ins.mem_offset != 0) out << " offset=" << ins.mem_offset;
        break;
    default:
        out << keyword(ins.op);
        break;
    }
    out << "\n";
}

void print_seq(std::ostringstream& out, const std::vector<Instruction>& seq,
               int indent) {
    for (const auto& ins : seq) print_one(out, ins, indent);
}

}  // namespace

std::string print_instruction(const Instruction& ins, int indent) {
    std::ostringstream out;
    print_one(out, ins, indent);
    return out.str();
}

std::string print_module(const Module& m) {
    std::ostringstream out;
    out << "(module\n";
    for (uint32_t i = 0; i < m.types.size(); ++i) {
        out << "  (type (func";
        print_block_type(out, m.types[i]);
        out << "))\n";
    }
    for (const auto& imp : m.imports) {
        out << "  (import \"" << imp.module_name << "\" \"" << imp.item_name
            << "\" (func (type " << imp.type_index << ")))\n";
    }
    for (const auto& g : m.globals) {
        out << "  (global ";
        if (g.is_mutable)
            out << "(mut " << name(g.type) << ")";
        else
            out << name(g.type);
        out << " (";
        Instruction init;
        init.imm = g.init_bits;
        switch (g.type) {
        case ValueType::I32:
            out << "i32.const " << static_cast<int32_t>(g.init_bits);
            break;
        case ValueType::I64:
            out << "i64.const " << static_cast<int64_t>(g.init_bits);
            break;
        case ValueType::F32:
            out << "f32.const "
                << float_literal(Value{ValueType::F32, g.init_bits}.as_f32());
            break;
        case ValueType::F64:
            out << "f64.const "
                << float_literal(Value{ValueType::F64, g.init_bits}.as_f64());
            break;
        }
        out << "))\n";
    }
    if (m.has_memory) out << "  (memory " << m.memory_pages << ")\n";
    if (m.has_table) {
        out << "  (table " << m.table_size << " funcref)\n";
        if (!m.table.empty()) {
            out << "  (elem (i32.const 0)";
            for (uint32_t f : m.table) out << " " << f;
            out << ")\n";
        }
    }
    for (const auto& f : m.funcs) {
        out << "  (func (type " << f.type_index << ")";
        for (ValueType t : f.locals) out << " (local " << name(t) << ")";
        out << "\n";
        std::ostringstream body;
        print_seq(body, f.body, 2);
        out << body.str();
        out << "  )\n";
    }
    for (const auto& e : m.exports)
        out << "  (export \"" << e.name << "\" (func " << e.func_index
            << "))\n";
    out << ")\n";
    return out.str();
}

}  // namespace wasmk
