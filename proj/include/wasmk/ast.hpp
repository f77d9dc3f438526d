#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wasmk {

enum class ValueType : uint8_t { I32, I64, F32, F64 };

const char* name(ValueType t);

struct FuncType {
    std::vector<ValueType> params;
    std::vector<ValueType> results;

    bool operator==(const FuncType&) const = default;
};

enum class Op : uint16_t {
    Unreachable,
    Nop,
    Drop,
    Select,
    Block,
    Loop,
    If,
    Br,
    BrIf,
    BrTable,
    Return,
    Call,
    CallIndirect,
    LocalGet,
    LocalSet,
    LocalTee,
    GlobalGet,
    GlobalSet,
    I32Load,
    I64Load,
    F32Load,
    F64Load,
    I32Store,
    I64Store,
    F32Store,
    F64Store,
    I32Const,
    I64Const,
    F32Const,
    F64Const,
    I32Eqz,
    I32Eq,
    I32Ne,
    I32LtS,
    I32LtU,
    I32GtS,
    I32GtU,
    I32LeS,
    I32LeU,
    I32GeS,
    I32GeU,
    I32Add,
    I32Sub,
    I32Mul,
    I32DivS,
    I32DivU,
    I32RemS,
    I32RemU,
    I32And,
    I32Or,
    I32Xor,
    I32Shl,
    I32ShrS,
    I32ShrU,
    I64Eqz,
    I64Eq,
    I64Ne,
    I64LtS,
    I64LtU,
    I64GtS,
    I64GtU,
    I64LeS,
    I64LeU,
    I64GeS,
    I64GeU,
    I64Add,
    I64Sub,
    I64Mul,
    I64DivS,
    I64DivU,
    I64RemS,
    I64RemU,
    I64And,
    I64Or,
    I64Xor,
    I64Shl,
    I64ShrS,
    I64ShrU,
    F32Eq,
    F32Ne,
    F32Lt,
    F32Gt,
    F32Le,
    F32Ge,
    F32Add,
    F32Sub,
    F32Mul,
    F32Div,
    F32Neg,
    F64Eq,
    F64Ne,
    F64Lt,
    F64Gt,
    F64Le,
    F64Ge,
    F64Add,
    F64Sub,
    F64Mul,
    F64Div,
    F64Neg,
    I32WrapI64,
    I64ExtendI32S,
    I64ExtendI32U,
    F64ConvertI64S,
    F64ConvertI32S,
    I32TruncF64S,
    I64TruncF64S,
    F64PromoteF32,
    F32DemoteF64,
    // stack-switching extension
    Control,
    Restore,
    ContinuationCopy,
    ContinuationDelete,
    Prompt,
};

// Keyword as written in the text format, or nullptr for ops that are
// spelled structurally (block/loop/if/prompt have their own productions).
const char* keyword(Op op);

struct Instruction {
    Op op = Op::Nop;
    // Const bits (f32 in low 32 bits), or index immediate: local/global/
    // function/type index, branch depth.
    uint64_t imm = 0;
    // Static memory offset for load/store.
    uint32_t mem_offset = 0;
    // Result (and, for prompt, param) types of block/loop/if/prompt.
    FuncType block_type;
    std::vector<Instruction> body;       // block/loop/prompt body, if-then
    std::vector<Instruction> else_body;  // if-else
    std::vector<uint32_t> br_targets;    // br_table targets, default last
};

struct FuncDecl {
    uint32_t type_index = 0;
    std::vector<ValueType> locals;  // excluding params
    std::vector<Instruction> body;
    std::string name;  // $id if present, for diagnostics only
};

struct GlobalDecl {
    ValueType type = ValueType::I32;
    bool is_mutable = false;
    uint64_t init_bits = 0;  // value of the const initializer
    std::string name;
};

struct ImportDecl {
    std::string module_name;
    std::string item_name;
    uint32_t type_index = 0;
    std::string name;  // $id
};

struct ExportDecl {
    std::string name;
    uint32_t func_index = 0;
};

struct Module {
    std::vector<FuncType> types;
    std::vector<ImportDecl> imports;  // function imports; index space [0, n)
    std::vector<FuncDecl> funcs;      // function index = imports.size() + i
    std::vector<GlobalDecl> globals;
    bool has_table = false;
    uint32_t table_size = 0;
    std::vector<uint32_t> table;  // function indices, element 0 first
    bool has_memory = false;
    uint32_t memory_pages = 0;
    std::vector<ExportDecl> exports;

    size_t func_count() const { return imports.size() + funcs.size(); }
    const FuncType& func_type(uint32_t index) const;
};

// Structural equality ignoring $id names (used by the round-trip property).
bool structurally_equal(const Instruction& a, const Instruction& b);
bool structurally_equal(const Module& a, const Module& b);

// Plain (non-folded) text rendering that parse_module accepts back.
std::string print_module(const Module& m);
std::string print_instruction(const Instruction& ins, int indent = 0);

}  // namespace wasmk
