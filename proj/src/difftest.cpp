#include "wasmk/difftest.hpp"

#include <random>

#include "wasmk/interpreter.hpp"
#include "wasmk/oracle.hpp"

namespace wasmk {

namespace {

using Rng = std::mt19937_64;

uint64_t pick(Rng& rng, uint64_t n) { return rng() % n; }

// Appends instructions that push exactly one i64, drawing from constants,
// the function's i64 parameters, arithmetic, and nested blocks/br/if.
void gen_i64(Rng& rng, std::vector<Instruction>& out, uint32_t n_params,
             int depth) {
    auto ins = [&](Op op, uint64_t imm = 0) {
        Instruction i;
        i.op = op;
        i.imm = imm;
        out.push_back(std::move(i));
    };
    if (depth <= 0) {
        if (n_params > 0 && pick(rng, 2) == 0)
            ins(Op::LocalGet, pick(rng, n_params));
        else
            ins(Op::I64Const, rng() % 1000);
        return;
    }
    switch (pick(rng, 8)) {
    case 0: ins(Op::I64Const, rng()); break;
    case 1:
        if (n_params > 0) {
            ins(Op::LocalGet, pick(rng, n_params));
            break;
        }
        [[fallthrough]];
    case 2:
    case 3: {
        gen_i64(rng, out, n_params, depth - 1);
        gen_i64(rng, out, n_params, depth - 1);
        static const Op ops[] = {Op::I64Add, Op::I64Sub, Op::I64Mul,
                                 Op::I64And, Op::I64Or,  Op::I64Xor,
                                 Op::I64Shl, Op::I64ShrS};
        ins(ops[pick(rng, 8)]);
        break;
    }
    case 4: {
        // block (result i64) <e> br 0 end
        Instruction b;
        b.op = Op::Block;
        b.block_type.results = {ValueType::I64};
        gen_i64(rng, b.body, n_params, depth - 1);
        Instruction br;
        br.op = Op::Br;
        br.imm = 0;
        b.body.push_back(std::move(br));
        out.push_back(std::move(b));
        break;
    }
    case 5: {
        // <e> i64.eqz if (result i64) <e> else <e> end
        gen_i64(rng, out, n_params, depth - 1);
        ins(Op::I64Eqz);
        Instruction f;
        f.op = Op::If;
        f.block_type.results = {ValueType::I64};
        gen_i64(rng, f.body, n_params, depth - 1);
        gen_i64(rng, f.else_body, n_params, depth - 1);
        out.push_back(std::move(f));
        break;
    }
    case 6: {
        // block (result i64) <e> <e> i64.eqz br_if 0 drop <e> br 0 end
        Instruction b;
        b.op = Op::Block;
        b.block_type.results = {ValueType::I64};
        gen_i64(rng, b.body, n_params, depth - 1);
        gen_i64(rng, b.body, n_params, depth - 1);
        Instruction eqz;
        eqz.op = Op::I64Eqz;
        b.body.push_back(eqz);
        Instruction bi;
        bi.op = Op::BrIf;
        bi.imm = 0;
        b.body.push_back(bi);
        Instruction dr;
        dr.op = Op::Drop;
        b.body.push_back(dr);
        gen_i64(rng, b.body, n_params, depth - 1);
        Instruction br;
        br.op = Op::Br;
        br.imm = 0;
        b.body.push_back(std::move(br));
        out.push_back(std::move(b));
        break;
    }
    default:
        gen_i64(rng, out, n_params, depth - 1);
        ins(Op::I64Const, 1 + rng() % 99);
        ins(Op::I64Add);
        break;
    }
}

Instruction op_ins(Op op, uint64_t imm = 0) {
    Instruction i;
    i.op = op;
    i.imm = imm;
    return i;
}

enum class ExpectedClass { Values, TrapKind };

struct GeneratedCase {
    Module module;
    ExpectedClass expected = ExpectedClass::Values;
    TrapKind kind = TrapKind::Unreachable;
    const char* name = "";
};

// Templates keep the expected outcome class decidable: either "some values,
// no trap" or an exact trap kind, independent of the random arithmetic.
GeneratedCase generate(Rng& rng) {
    GeneratedCase c;
    Module& m = c.module;
    m.types.push_back(FuncType{{ValueType::I64}, {ValueType::I64}});  // main
    m.types.push_back(FuncType{{ValueType::I64, ValueType::I64}, {}});

    FuncDecl main_f;
    main_f.type_index = 0;
    uint32_t tpl = static_cast<uint32_t>(pick(rng, 10));
    switch (tpl) {
    case 0: {  // pure arithmetic and control flow
        c.name = "pure";
        gen_i64(rng, main_f.body, 1, 4);
        break;
    }
    case 1:    // capture then always-restore handler
    case 2: {  // the same, wrapped in a prompt
        c.name = tpl == 1 ? "capture-restore" : "capture-restore-prompt";
        FuncDecl h;
        h.type_index = 1;
        h.body.push_back(op_ins(Op::LocalGet, 0));  // kappa
        gen_i64(rng, h.body, 2, 2);
        h.body.push_back(op_ins(Op::LocalGet, 1));
        h.body.push_back(op_ins(Op::I64Add));
        h.body.push_back(op_ins(Op::Restore));
        if (pick(rng, 2)) {
            // dead code after restore is legal (stack-polymorphic tail)
            h.body.push_back(op_ins(Op::I64Const, 7));
            h.body.push_back(op_ins(Op::Drop));
        }
        std::vector<Instruction> inner;
        gen_i64(rng, inner, 1, 3);
        inner.push_back(op_ins(Op::Control, 1));  // handler is func 1
        gen_i64(rng, inner, 1, 2);
        inner.push_back(op_ins(Op::I64Xor));
        if (tpl == 2) {
            Instruction p;
            p.op = Op::Prompt;
            p.block_type.results = {ValueType::I64};
            p.body = std::move(inner);
            main_f.body.push_back(std::move(p));
        } else {
            main_f.body = std::move(inner);
        }
        m.funcs.push_back(main_f);
        m.funcs.push_back(std::move(h));
        m.exports.push_back({"main", 0});
        return c;
    }
    case 3: {  // restore while the root is executing
        c.name = "restore-at-root";
        c.expected = ExpectedClass::TrapKind;
        c.kind = TrapKind::RootViolation;
        gen_i64(rng, main_f.body, 1, 2);
        main_f.body.push_back(op_ins(Op::Drop));
        main_f.body.push_back(op_ins(Op::I64Const, rng() % 100));
        main_f.body.push_back(op_ins(Op::I64Const, rng() % 100));
        main_f.body.push_back(op_ins(Op::Restore));
        break;
    }
    case 4: {  // handler that falls through
        c.name = "handler-fall-through";
        c.expected = ExpectedClass::TrapKind;
        c.kind = TrapKind::HandlerReturned;
        FuncDecl h;
        h.type_index = 1;
        gen_i64(rng, h.body, 2, 1);
        h.body.push_back(op_ins(Op::Drop));
        gen_i64(rng, main_f.body, 1, 2);
        main_f.body.push_back(op_ins(Op::Control, 1));
        m.funcs.push_back(main_f);
        m.funcs.push_back(std::move(h));
        m.exports.push_back({"main", 0});
        return c;
    }
    case 5: {  // copy of an unallocated ID
        c.name = "copy-unallocated";
        c.expected = ExpectedClass::TrapKind;
        c.kind = TrapKind::UnallocatedContinuation;
        main_f.body.push_back(op_ins(Op::I64Const, 1000 + rng() % 1000));
        main_f.body.push_back(op_ins(Op::ContinuationCopy));
        break;
    }
    case 6: {  // delete of an unallocated ID
        c.name = "delete-unallocated";
        c.expected = ExpectedClass::TrapKind;
        c.kind = TrapKind::UnallocatedContinuation;
        main_f.body.push_back(op_ins(Op::I64Const, 1000 + rng() % 1000));
        main_f.body.push_back(op_ins(Op::ContinuationDelete));
        gen_i64(rng, main_f.body, 1, 1);
        break;
    }
    case 7: {  // division by a zero constant
        c.name = "div-by-zero";
        c.expected = ExpectedClass::TrapKind;
        c.kind = TrapKind::DivideByZero;
        gen_i64(rng, main_f.body, 1, 2);
        main_f.body.push_back(op_ins(Op::I64Const, 0));
        main_f.body.push_back(op_ins(Op::I64DivS));
        break;
    }
    case 8: {  // explicit unreachable
        c.name = "unreachable";
        c.expected = ExpectedClass::TrapKind;
        c.kind = TrapKind::Unreachable;
        gen_i64(rng, main_f.body, 1, 1);
        main_f.body.push_back(op_ins(Op::Drop));
        main_f.body.push_back(op_ins(Op::Unreachable));
        break;
    }
    default: {  // two captures; the stale saved ID aliases the second one
        c.name = "double-capture-alias";
        m.globals.push_back({ValueType::I64, true, 0, ""});
        FuncDecl h1;
        h1.type_index = 1;
        h1.body.push_back(op_ins(Op::LocalGet, 0));
        h1.body.push_back(op_ins(Op::GlobalSet, 0));
        h1.body.push_back(op_ins(Op::LocalGet, 0));
        h1.body.push_back(op_ins(Op::LocalGet, 1));
        h1.body.push_back(op_ins(Op::Restore));
        FuncDecl h2;
        h2.type_index = 1;
        h2.body.push_back(op_ins(Op::GlobalGet, 0));
        h2.body.push_back(op_ins(Op::LocalGet, 1));
        h2.body.push_back(op_ins(Op::I64Const, 1));
        h2.body.push_back(op_ins(Op::I64Add));
        h2.body.push_back(op_ins(Op::Restore));
        gen_i64(rng, main_f.body, 1, 2);
        main_f.body.push_back(op_ins(Op::Control, 1));
        main_f.body.push_back(op_ins(Op::Control, 2));
        gen_i64(rng, main_f.body, 1, 1);
        main_f.body.push_back(op_ins(Op::I64Add));
        m.funcs.push_back(main_f);
        m.funcs.push_back(std::move(h1));
        m.funcs.push_back(std::move(h2));
        m.exports.push_back({"main", 0});
        return c;
    }
    }
    m.funcs.push_back(std::move(main_f));
    m.exports.push_back({"main", 0});
    return c;
}

}  // namespace

DifftestResult run_difftest(const DifftestOptions& options) {
    DifftestResult result;
    std::string sink_fast, sink_oracle;
    HostRegistry hosts_fast = standard_host_registry(&sink_fast);
    HostRegistry hosts_oracle = standard_host_registry(&sink_oracle);

    for (size_t i = 0; i < options.count; ++i) {
        Rng rng(options.seed * 1000003ULL + i);
        GeneratedCase c = generate(rng);
        ++result.cases;

        auto record = [&](const std::string& what) {
            ++result.failures;
            if (result.first_failure.empty())
                result.first_failure = "case " + std::to_string(i) + " (" +
                                       c.name + "): " + what + "\n" +
                                       print_module(c.module);
        };

        try {
            ValidatedModule vm = validate(std::move(c.module));
            c.module = vm.module;  // keep for diagnostics
            FastStore fs = instantiate<FastCtx>(vm, hosts_fast);
            OracleStore os = instantiate<OCtx>(vm, hosts_oracle);
            Value arg = Value::i64(rng());
            Outcome fast = invoke(fs, "main", {arg});
            OracleOptions oo;
            oo.fuel = options.fuel;
            oo.check_preservation = options.check_preservation;
            OracleOutcome oracle = oracle_invoke(os, "main", {arg}, oo);
            if (oracle.out_of_fuel) {
                record("oracle ran out of fuel");
                continue;
            }
            if (!fast.same_observable(oracle.outcome)) {
                record("engines disagree: fast " + to_string(fast) +
                       ", oracle " + to_string(oracle.outcome));
                continue;
            }
            if (c.expected == ExpectedClass::Values) {
                if (fast.is_trap())
                    record("expected values, got " + to_string(fast));
            } else {
                if (!fast.is_trap() || fast.trap_kind != c.kind)
                    record(std::string("expected trap ") + name(c.kind) +
                           ", got " + to_string(fast));
            }
            if (fs.pstack.depth() != 0 || os.pstack.depth() != 0)
                record("prompt stack not balanced after invoke");
        } catch (const std::exception& e) {
            record(std::string("exception: ") + e.what());
        }
    }
    return result;
}

}  // namespace wasmk
