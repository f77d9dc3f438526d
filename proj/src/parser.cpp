#include "wasmk/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <unordered_map>

namespace wasmk {

namespace {

struct SExpr {
    bool is_list = false;
    std::string atom;  // also holds string literal contents (quoted flag set)
    bool quoted = false;
    std::vector<SExpr> items;
    int line = 1;
    int col = 1;
};

struct Tokenizer {
    const std::string& src;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    explicit Tokenizer(const std::string& s) : src(s) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line, col);
    }

    int peek() const { return pos < src.size() ? src[pos] : -1; }

    int get() {
        if (pos >= src.size()) return -1;
        char c = src[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    void skip_space() {
        for (;;) {
            int c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                get();
            } else if (c == ';' && pos + 1 < src.size() &&
                       src[pos + 1] == ';') {
                while (peek() != -1 && peek() != '\n') get();
            } else if (c == '(' && pos + 1 < src.size() &&
                       src[pos + 1] == ';') {
                int start_line = line;
                int depth = 0;
                for (;;) {
                    int d = get();
                    if (d == -1)
                        throw ParseError("unterminated block comment",
                                         start_line, 1);
                    if (d == '(' && peek() == ';') {
                        get();
                        ++depth;
                    } else if (d == ';' && peek() == ')') {
                        get();
                        if (--depth == 0) break;
                    }
                }
            } else {
                break;
            }
        }
    }

    SExpr parse_expr() {
        skip_space();
        SExpr e;
        e.line = line;
        e.col = col;
        int c = peek();
        if (c == -1) fail("unexpected end of input");
        if (c == '(') {
            get();
            e.is_list = true;
            for (;;) {
                skip_space();
                if (peek() == ')') {
                    get();
                    return e;
                }
                if (peek() == -1) fail("unbalanced '(' (missing ')')");
                e.items.push_back(parse_expr());
            }
        }
        if (c == ')') fail("unexpected ')'");
        if (c == '"') {
            get();
            e.quoted = true;
            for (;;) {
                int d = get();
                if (d == -1) fail("unterminated string");
                if (d == '"') return e;
                if (d == '\\') {
                    int x = get();
                    switch (x) {
                    case 'n': e.atom += '\n'; break;
                    case 't': e.atom += '\t'; break;
                    case '\\': e.atom += '\\'; break;
                    case '"': e.atom += '"'; break;
                    default: fail("bad string escape");
                    }
                } else {
                    e.atom += static_cast<char>(d);
                }
            }
        }
        while (c != -1 && c != '(' && c != ')' && c != '"' && c != ' ' &&
               c != '\t' && c != '\r' && c != '\n') {
            e.atom += static_cast<char>(get());
            c = peek();
        }
        if (e.atom.empty()) fail("empty token");
        return e;
    }

    std::vector<SExpr> parse_all() {
        std::vector<SExpr> out;
        for (;;) {
            skip_space();
            if (peek() == -1) return out;
            out.push_back(parse_expr());
        }
    }
};

[[noreturn]] void fail_at(const SExpr& e, const std::string& msg) {
    throw ParseError(msg, e.line, e.col);
}

bool is_atom(const SExpr& e, const char* s) {
    return !e.is_list && !e.quoted && e.atom == s;
}

bool list_headed(const SExpr& e, const char* head) {
    return e.is_list && !e.items.empty() && is_atom(e.items[0], head);
}

const std::unordered_map<std::string, Op>& op_keywords() {
    static const auto* map = [] {
        auto* m = new std::unordered_map<std::string, Op>;
        for (int i = 0; i <= static_cast<int>(Op::Prompt); ++i) {
            Op op = static_cast<Op>(i);
            (*m)[keyword(op)] = op;
        }
        return m;
    }();
    return *map;
}

bool parse_value_type(const SExpr& e, ValueType& out) {
    if (e.is_list || e.quoted) return false;
    if (e.atom == "i32")
        out = ValueType::I32;
    else if (e.atom == "i64")
        out = ValueType::I64;
    else if (e.atom == "f32")
        out = ValueType::F32;
    else if (e.atom == "f64")
        out = ValueType::F64;
    else
        return false;
    return true;
}

uint64_t parse_int_atom(const SExpr& e) {
    if (e.is_list || e.quoted) fail_at(e, "expected integer");
    const std::string& s = e.atom;
    bool neg = !s.empty() && s[0] == '-';
    const char* p = s.c_str() + (neg ? 1 : 0);
    char* end = nullptr;
    uint64_t mag = std::strtoull(p, &end, 0);
    if (end == p || *end != '\0') fail_at(e, "bad integer literal '" + s + "'");
    return neg ? static_cast<uint64_t>(-static_cast<int64_t>(mag)) : mag;
}

double parse_float_atom(const SExpr& e) {
    if (e.is_list || e.quoted) fail_at(e, "expected float");
    char* end = nullptr;
    double v = std::strtod(e.atom.c_str(), &end);
    if (end == e.atom.c_str() || *end != '\0')
        fail_at(e, "bad float literal '" + e.atom + "'");
    return v;
}

Value parse_const_expr(const SExpr& e) {
    if (!e.is_list || e.items.size() != 2 || e.items[0].is_list)
        fail_at(e, "expected (tN.const value)");
    const std::string& op = e.items[0].atom;
    if (op == "i32.const")
        return Value::i32(static_cast<uint32_t>(parse_int_atom(e.items[1])));
    if (op == "i64.const") return Value::i64(parse_int_atom(e.items[1]));
    if (op == "f32.const")
        return Value::f32(static_cast<float>(parse_float_atom(e.items[1])));
    if (op == "f64.const") return Value::f64(parse_float_atom(e.items[1]));
    fail_at(e, "expected a const expression, got '" + op + "'");
}

struct ModuleBuilder {
    Module m;
    std::unordered_map<std::string, uint32_t> func_names;
    std::unordered_map<std::string, uint32_t> global_names;
    std::unordered_map<std::string, uint32_t> type_names;

    uint32_t intern_type(const FuncType& tf) {
        for (uint32_t i = 0; i < m.types.size(); ++i)
            if (m.types[i] == tf) return i;
        m.types.push_back(tf);
        return static_cast<uint32_t>(m.types.size() - 1);
    }

    uint32_t resolve_func(const SExpr& e) {
        if (!e.is_list && !e.quoted && e.atom[0] == '$') {
            auto it = func_names.find(e.atom);
            if (it == func_names.end())
                fail_at(e, "unknown function '" + e.atom + "'");
            return it->second;
        }
        uint32_t idx = static_cast<uint32_t>(parse_int_atom(e));
        if (idx >= m.func_count()) fail_at(e, "function index out of range");
        return idx;
    }

    uint32_t resolve_global(const SExpr& e) {
        if (!e.is_list && !e.quoted && e.atom[0] == '$') {
            auto it = global_names.find(e.atom);
            if (it == global_names.end())
                fail_at(e, "unknown global '" + e.atom + "'");
            return it->second;
        }
        uint32_t idx = static_cast<uint32_t>(parse_int_atom(e));
        if (idx >= m.globals.size()) fail_at(e, "global index out of range");
        return idx;
    }
};

// Parses (param ...) / (result ...) / (local ...) clauses, recording $names.
void parse_sig_clause(const SExpr& e, std::vector<ValueType>& out,
                      std::unordered_map<std::string, uint32_t>* names,
                      uint32_t name_base) {
    size_t i = 1;
    if (i < e.items.size() && !e.items[i].is_list && !e.items[i].quoted &&
        e.items[i].atom[0] == '$') {
        ValueType t;
        if (e.items.size() != 3 || !parse_value_type(e.items[2], t))
            fail_at(e, "expected ($name type)");
        if (names)
            (*names)[e.items[1].atom] =
                name_base + static_cast<uint32_t>(out.size());
        out.push_back(t);
        return;
    }
    for (; i < e.items.size(); ++i) {
        ValueType t;
        if (!parse_value_type(e.items[i], t))
            fail_at(e.items[i], "expected a value type");
        out.push_back(t);
    }
}

struct BodyParser {
    ModuleBuilder& b;
    const std::vector<SExpr>& items;
    size_t pos;
    std::unordered_map<std::string, uint32_t>& local_names;

    const SExpr& next() {
        if (pos >= items.size())
            fail_at(items.back(), "unexpected end of function body");
        return items[pos++];
    }

    const SExpr* peek() { return pos < items.size() ? &items[pos] : nullptr; }

    uint32_t resolve_local(const SExpr& e) {
        if (!e.is_list && !e.quoted && e.atom[0] == '$') {
            auto it = local_names.find(e.atom);
            if (it == local_names.end())
                fail_at(e, "unknown local '" + e.atom + "'");
            return it->second;
        }
        return static_cast<uint32_t>(parse_int_atom(e));
    }

    FuncType parse_block_type(bool allow_params) {
        FuncType tf;
        while (const SExpr* p = peek()) {
            if (list_headed(*p, "param")) {
                if (!allow_params)
                    fail_at(*p, "block parameters are only allowed on prompt");
                parse_sig_clause(next(), tf.params, nullptr, 0);
            } else if (list_headed(*p, "result")) {
                parse_sig_clause(next(), tf.results, nullptr, 0);
            } else {
                break;
            }
        }
        return tf;
    }

    // Parses until one of the terminator atoms; returns which one was seen.
    std::string parse_seq(std::vector<Instruction>& out,
                          std::initializer_list<const char*> terminators) {
        for (;;) {
            if (pos >= items.size()) {
                if (terminators.size() == 0) return "";
                fail_at(items.empty() ? SExpr{} : items.back(),
                        "missing 'end'");
            }
            const SExpr& e = items[pos];
            for (const char* t : terminators)
                if (is_atom(e, t)) {
                    ++pos;
                    return t;
                }
            out.push_back(parse_instruction());
        }
    }

    Instruction parse_instruction() {
        const SExpr& e = next();
        if (e.is_list || e.quoted)
            fail_at(e, "expected an instruction keyword (plain format)");
        auto it = op_keywords().find(e.atom);
        if (it == op_keywords().end())
            fail_at(e, "unknown instruction '" + e.atom + "'");
        Instruction ins;
        ins.op = it->second;
        switch (ins.op) {
        case Op::I32Const:
        case Op::I64Const: ins.imm = parse_int_atom(next()); break;
        case Op::F32Const:
            ins.imm =
                Value::f32(static_cast<float>(parse_float_atom(next()))).bits;
            break;
        case Op::F64Const:
            ins.imm = Value::f64(parse_float_atom(next())).bits;
            break;
        case Op::LocalGet:
        case Op::LocalSet:
        case Op::LocalTee: ins.imm = resolve_local(next()); break;
        case Op::GlobalGet:
        case Op::GlobalSet: ins.imm = b.resolve_global(next()); break;
        case Op::Br:
        case Op::BrIf: ins.imm = parse_int_atom(next()); break;
        case Op::BrTable: {
            bool any = false;
            while (const SExpr* p = peek()) {
                if (p->is_list || p->quoted ||
                    !(std::isdigit(static_cast<unsigned char>(p->atom[0]))))
                    break;
                ins.br_targets.push_back(
                    static_cast<uint32_t>(parse_int_atom(next())));
                any = true;
            }
            if (!any) fail_at(e, "br_table needs at least a default target");
            break;
        }
        case Op::Call:
        case Op::Control: ins.imm = b.resolve_func(next()); break;
        case Op::CallIndirect: {
            FuncType tf;
            bool have_type = false;
            while (const SExpr* p = peek()) {
                if (list_headed(*p, "type")) {
                    const SExpr& te = next();
                    if (te.items.size() != 2) fail_at(te, "bad (type ...)");
                    const SExpr& id = te.items[1];
                    if (!id.is_list && !id.quoted && id.atom[0] == '$') {
                        auto tn = b.type_names.find(id.atom);
                        if (tn == b.type_names.end())
                            fail_at(id, "unknown type '" + id.atom + "'");
                        ins.imm = tn->second;
                    } else {
                        ins.imm = parse_int_atom(id);
                        if (ins.imm >= b.m.types.size())
                            fail_at(id, "type index out of range");
                    }
                    have_type = true;
                } else if (list_headed(*p, "param")) {
                    parse_sig_clause(next(), tf.params, nullptr, 0);
                } else if (list_headed(*p, "result")) {
                    parse_sig_clause(next(), tf.results, nullptr, 0);
                } else {
                    break;
                }
            }
            if (!have_type) ins.imm = b.intern_type(tf);
            break;
        }
        case Op::I32Load:
        case Op::I64Load:
        case Op::F32Load:
        case Op::F64Load:
        case Op::I32Store:
        case Op::I64Store:
        case Op::F32Store:
        case Op::F64Store: {
            while (const SExpr* p = peek()) {
                if (p->is_list || p->quoted) break;
                if (p->atom.rfind("offset=", 0) == 0) {
                    ins.mem_offset = static_cast<uint32_t>(
                        std::strtoull(p->atom.c_str() + 7, nullptr, 0));
                    ++pos;
                } else if (p->atom.rfind("align=", 0) == 0) {
                    ++pos;  // alignment hint, ignored
                } else {
                    break;
                }
            }
            break;
        }
        case Op::Block:
        case Op::Loop:
            ins.block_type = parse_block_type(false);
            parse_seq(ins.body, {"end"});
            break;
        case Op::Prompt:
            ins.block_type = parse_block_type(true);
            parse_seq(ins.body, {"end"});
            break;
        case Op::If: {
            ins.block_type = parse_block_type(false);
            std::string term = parse_seq(ins.body, {"else", "end"});
            if (term == "else") parse_seq(ins.else_body, {"end"});
            break;
        }
        default: break;  // no immediates
        }
        return ins;
    }
};

void parse_func(ModuleBuilder& b, const SExpr& e, FuncDecl& f) {
    size_t i = 1;
    if (i < e.items.size() && !e.items[i].is_list && !e.items[i].quoted &&
        e.items[i].atom[0] == '$')
        ++i;  // name already collected
    // inline (export "x")
    while (i < e.items.size() && list_headed(e.items[i], "export")) ++i;
    FuncType tf;
    bool explicit_type = false;
    std::unordered_map<std::string, uint32_t> local_names;
    if (i < e.items.size() && list_headed(e.items[i], "type")) {
        const SExpr& te = e.items[i];
        if (te.items.size() != 2) fail_at(te, "bad (type ...)");
        const SExpr& id = te.items[1];
        uint32_t ti;
        if (!id.is_list && !id.quoted && id.atom[0] == '$') {
            auto it = b.type_names.find(id.atom);
            if (it == b.type_names.end())
                fail_at(id, "unknown type '" + id.atom + "'");
            ti = it->second;
        } else {
            ti = static_cast<uint32_t>(parse_int_atom(id));
            if (ti >= b.m.types.size()) fail_at(id, "type index out of range");
        }
        f.type_index = ti;
        tf = b.m.types[ti];
        explicit_type = true;
        ++i;
    }
    while (i < e.items.size() && list_headed(e.items[i], "param")) {
        if (explicit_type) fail_at(e.items[i], "params after explicit (type)");
        parse_sig_clause(e.items[i], tf.params, &local_names, 0);
        ++i;
    }
    while (i < e.items.size() && list_headed(e.items[i], "result")) {
        if (explicit_type) fail_at(e.items[i], "results after explicit (type)");
        parse_sig_clause(e.items[i], tf.results, nullptr, 0);
        ++i;
    }
    if (tf.results.size() > 1)
        fail_at(e, "at most one result is supported");
    if (!explicit_type) f.type_index = b.intern_type(tf);
    uint32_t nparams = static_cast<uint32_t>(tf.params.size());
    while (i < e.items.size() && list_headed(e.items[i], "local")) {
        std::vector<ValueType> ls;
        parse_sig_clause(e.items[i], ls, &local_names,
                         nparams + static_cast<uint32_t>(f.locals.size()));
        for (ValueType t : ls) f.locals.push_back(t);
        ++i;
    }
    BodyParser bp{b, e.items, i, local_names};
    bp.parse_seq(f.body, {});
}

Module parse_module_sexpr(const SExpr& root) {
    if (!list_headed(root, "module")) fail_at(root, "expected (module ...)");
    ModuleBuilder b;
    // pass 1: indices and names
    std::vector<const SExpr*> func_fields;
    for (size_t i = 1; i < root.items.size(); ++i) {
        const SExpr& e = root.items[i];
        if (!e.is_list || e.items.empty() || e.items[0].is_list)
            fail_at(e, "expected a module field");
        const std::string& head = e.items[0].atom;
        if (head == "type") {
            size_t j = 1;
            std::string tname;
            if (j < e.items.size() && !e.items[j].is_list &&
                e.items[j].atom[0] == '$')
                tname = e.items[j++].atom;
            if (j >= e.items.size() || !list_headed(e.items[j], "func"))
                fail_at(e, "expected (type $name? (func ...))");
            FuncType tf;
            for (size_t k = 1; k < e.items[j].items.size(); ++k) {
                const SExpr& c = e.items[j].items[k];
                if (list_headed(c, "param"))
                    parse_sig_clause(c, tf.params, nullptr, 0);
                else if (list_headed(c, "result"))
                    parse_sig_clause(c, tf.results, nullptr, 0);
                else
                    fail_at(c, "expected (param ...) or (result ...)");
            }
            b.m.types.push_back(tf);
            if (!tname.empty())
                b.type_names[tname] =
                    static_cast<uint32_t>(b.m.types.size() - 1);
        } else if (head == "import") {
            if (!b.m.funcs.empty())
                fail_at(e, "imports must precede function definitions");
            if (e.items.size() != 4 || !e.items[1].quoted ||
                !e.items[2].quoted || !list_headed(e.items[3], "func"))
                fail_at(e, "expected (import \"m\" \"n\" (func ...))");
            ImportDecl imp;
            imp.module_name = e.items[1].atom;
            imp.item_name = e.items[2].atom;
            FuncType tf;
            bool explicit_type = false;
            for (size_t k = 1; k < e.items[3].items.size(); ++k) {
                const SExpr& c = e.items[3].items[k];
                if (!c.is_list && !c.quoted && c.atom[0] == '$')
                    imp.name = c.atom;
                else if (list_headed(c, "param"))
                    parse_sig_clause(c, tf.params, nullptr, 0);
                else if (list_headed(c, "result"))
                    parse_sig_clause(c, tf.results, nullptr, 0);
                else if (list_headed(c, "type")) {
                    if (c.items.size() != 2) fail_at(c, "bad (type ...)");
                    imp.type_index =
                        static_cast<uint32_t>(parse_int_atom(c.items[1]));
                    explicit_type = true;
                } else
                    fail_at(c, "bad import func clause");
            }
            if (!explicit_type) imp.type_index = b.intern_type(tf);
            if (!imp.name.empty())
                b.func_names[imp.name] =
                    static_cast<uint32_t>(b.m.imports.size());
            b.m.imports.push_back(imp);
        }
    }
    for (size_t i = 1; i < root.items.size(); ++i) {
        const SExpr& e = root.items[i];
        const std::string& head = e.items[0].atom;
        if (head == "func") {
            FuncDecl f;
            if (e.items.size() > 1 && !e.items[1].is_list &&
                !e.items[1].quoted && e.items[1].atom[0] == '$') {
                f.name = e.items[1].atom;
                b.func_names[f.name] = static_cast<uint32_t>(
                    b.m.imports.size() + b.m.funcs.size());
            }
            b.m.funcs.push_back(std::move(f));
            func_fields.push_back(&e);
        } else if (head == "global") {
            GlobalDecl g;
            size_t j = 1;
            if (j < e.items.size() && !e.items[j].is_list &&
                e.items[j].atom[0] == '$') {
                g.name = e.items[j++].atom;
                b.global_names[g.name] =
                    static_cast<uint32_t>(b.m.globals.size());
            }
            if (j >= e.items.size()) fail_at(e, "global missing type");
            if (list_headed(e.items[j], "mut")) {
                g.is_mutable = true;
                if (e.items[j].items.size() != 2 ||
                    !parse_value_type(e.items[j].items[1], g.type))
                    fail_at(e.items[j], "bad (mut type)");
            } else if (!parse_value_type(e.items[j], g.type)) {
                fail_at(e.items[j], "bad global type");
            }
            ++j;
            if (j >= e.items.size()) fail_at(e, "global missing initializer");
            Value init = parse_const_expr(e.items[j]);
            if (init.type != g.type)
                fail_at(e.items[j], "global initializer type mismatch");
            g.init_bits = init.bits;
            b.m.globals.push_back(g);
        } else if (head == "memory") {
            if (e.items.size() < 2) fail_at(e, "memory needs a page count");
            b.m.has_memory = true;
            b.m.memory_pages =
                static_cast<uint32_t>(parse_int_atom(e.items[1]));
        }
    }
    // pass 2: table/elem/export/bodies (function names now known)
    size_t func_i = 0;
    for (size_t i = 1; i < root.items.size(); ++i) {
        const SExpr& e = root.items[i];
        const std::string& head = e.items[0].atom;
        if (head == "func") {
            FuncDecl& f = b.m.funcs[func_i++];
            parse_func(b, *func_fields[func_i - 1], f);
            // inline exports
            size_t j = 1;
            if (j < e.items.size() && !e.items[j].is_list &&
                !e.items[j].quoted && e.items[j].atom[0] == '$')
                ++j;
            while (j < e.items.size() && list_headed(e.items[j], "export")) {
                if (e.items[j].items.size() != 2 || !e.items[j].items[1].quoted)
                    fail_at(e.items[j], "bad inline export");
                b.m.exports.push_back(
                    {e.items[j].items[1].atom,
                     static_cast<uint32_t>(b.m.imports.size() + func_i - 1)});
                ++j;
            }
        } else if (head == "table") {
            b.m.has_table = true;
            size_t j = 1;
            if (j < e.items.size() && !e.items[j].is_list &&
                std::isdigit(static_cast<unsigned char>(e.items[j].atom[0]))) {
                b.m.table_size =
                    static_cast<uint32_t>(parse_int_atom(e.items[j]));
                ++j;
            }
            if (j < e.items.size() && is_atom(e.items[j], "funcref")) ++j;
            if (j < e.items.size() && list_headed(e.items[j], "elem")) {
                const SExpr& el = e.items[j];
                for (size_t k = 1; k < el.items.size(); ++k)
                    b.m.table.push_back(b.resolve_func(el.items[k]));
                if (b.m.table_size == 0)
                    b.m.table_size = static_cast<uint32_t>(b.m.table.size());
            }
        } else if (head == "elem") {
            size_t j = 1;
            uint32_t base = 0;
            if (j < e.items.size() && e.items[j].is_list) {
                Value v = parse_const_expr(e.items[j]);
                base = v.as_i32();
                ++j;
            }
            for (size_t k = j; k < e.items.size(); ++k) {
                uint32_t fi = b.resolve_func(e.items[k]);
                uint32_t at = base + static_cast<uint32_t>(k - j);
                if (b.m.table.size() <= at)
                    b.m.table.resize(at + 1, UINT32_MAX);
                b.m.table[at] = fi;
            }
            if (!b.m.has_table) {
                b.m.has_table = true;
                b.m.table_size = static_cast<uint32_t>(b.m.table.size());
            }
        } else if (head == "export") {
            if (e.items.size() != 3 || !e.items[1].quoted ||
                !list_headed(e.items[2], "func") ||
                e.items[2].items.size() != 2)
                fail_at(e, "expected (export \"name\" (func f))");
            ExportDecl ex;
            ex.name = e.items[1].atom;
            ex.func_index = b.resolve_func(e.items[2].items[1]);
            b.m.exports.push_back(ex);
        } else if (head == "type" || head == "import" || head == "global" ||
                   head == "memory") {
            // handled in pass 1
        } else {
            fail_at(e, "unknown module field '" + head + "'");
        }
    }
    // export names unique
    for (size_t i = 0; i < b.m.exports.size(); ++i)
        for (size_t j = i + 1; j < b.m.exports.size(); ++j)
            if (b.m.exports[i].name == b.m.exports[j].name)
                fail_at(root, "duplicate export '" + b.m.exports[i].name + "'");
    if (b.m.table_size < b.m.table.size())
        b.m.table_size = static_cast<uint32_t>(b.m.table.size());
    return b.m;
}

}  // namespace

Module parse_module(const std::string& text) {
    Tokenizer tok(text);
    SExpr root = tok.parse_expr();
    tok.skip_space();
    if (tok.peek() != -1)
        throw ParseError("trailing input after module", tok.line, tok.col);
    return parse_module_sexpr(root);
}

Script parse_script(const std::string& text) {
    Tokenizer tok(text);
    std::vector<SExpr> top = tok.parse_all();
    Script script;
    // Index, not pointer: directives reallocates as it grows.
    size_t current = SIZE_MAX;
    for (const SExpr& e : top) {
        Directive d;
        d.line = e.line;
        if (list_headed(e, "module")) {
            d.kind = Directive::Kind::ModuleDef;
            d.module = parse_module_sexpr(e);
            script.directives.push_back(std::move(d));
            current = script.directives.size() - 1;
            continue;
        }
        if (list_headed(e, "assert_invalid")) {
            if (e.items.size() != 3 || !e.items[2].quoted)
                fail_at(e, "expected (assert_invalid (module ...) \"msg\")");
            d.kind = Directive::Kind::AssertInvalid;
            d.module = parse_module_sexpr(e.items[1]);
            d.message = e.items[2].atom;
            script.directives.push_back(std::move(d));
            continue;
        }
        bool is_return = list_headed(e, "assert_return");
        bool is_trap = list_headed(e, "assert_trap");
        if (!is_return && !is_trap) fail_at(e, "unknown directive");
        if (e.items.size() < 2 || !list_headed(e.items[1], "invoke"))
            fail_at(e, "expected (invoke \"name\" args...)");
        const SExpr& inv = e.items[1];
        if (inv.items.size() < 2 || !inv.items[1].quoted)
            fail_at(inv, "invoke needs an export name");
        d.invoke.export_name = inv.items[1].atom;
        for (size_t k = 2; k < inv.items.size(); ++k)
            d.invoke.args.push_back(parse_const_expr(inv.items[k]));
        if (is_return) {
            d.kind = Directive::Kind::AssertReturn;
            for (size_t k = 2; k < e.items.size(); ++k)
                d.expected.push_back(parse_const_expr(e.items[k]));
        } else {
            d.kind = Directive::Kind::AssertTrap;
            if (e.items.size() != 3 || !e.items[2].quoted)
                fail_at(e, "assert_trap needs a message string");
            d.message = e.items[2].atom;
        }
        if (current == SIZE_MAX)
            fail_at(e, "assertion before any module definition");
        bool found = false;
        for (const auto& ex : script.directives[current].module.exports)
            if (ex.name == d.invoke.export_name) found = true;
        if (!found)
            fail_at(e, "invoke of unknown export '" + d.invoke.export_name +
                           "'");
        script.directives.push_back(std::move(d));
    }
    return script;
}

}  // namespace wasmk
