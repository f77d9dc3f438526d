#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wasmk/difftest.hpp"
#include "wasmk/interpreter.hpp"
#include "wasmk/oracle.hpp"
#include "wasmk/parser.hpp"
#include "wasmk/script.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSemantic = 1;
constexpr int kExitUsage = 2;

bool color_enabled() {
    const char* v = std::getenv("WASMK_COLOR");
    return !(v && std::string(v) == "0");
}

std::string paint(const std::string& s, const char* code) {
    if (!color_enabled()) return s;
    return std::string("\033[") + code + "m" + s + "\033[0m";
}

std::string green(const std::string& s) { return paint(s, "32"); }
std::string red(const std::string& s) { return paint(s, "31"); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

wasmk::Value parse_arg(const std::string& s) {
    auto colon = s.find(':');
    std::string type = colon == std::string::npos ? "i64" : s.substr(0, colon);
    std::string num = colon == std::string::npos ? s : s.substr(colon + 1);
    if (type == "i32")
        return wasmk::Value::i32(
            static_cast<uint32_t>(std::stoll(num, nullptr, 0)));
    if (type == "i64")
        return wasmk::Value::i64(
            static_cast<uint64_t>(std::stoll(num, nullptr, 0)));
    if (type == "f32") return wasmk::Value::f32(std::stof(num));
    if (type == "f64") return wasmk::Value::f64(std::stod(num));
    throw CLI::ValidationError("--arg", "unknown value type " + type);
}

int cmd_validate(const std::string& path) {
    std::string text = read_file(path);
    try {
        wasmk::validate(wasmk::parse_module(text));
    } catch (const std::exception& e) {
        std::cerr << red("invalid: ") << e.what() << "\n";
        return kExitSemantic;
    }
    std::cout << green("valid") << "\n";
    return kExitOk;
}

struct RunFlags {
    std::string invoke_name;
    std::vector<std::string> args;
    std::string engine = "fast";
    bool trace = false;
    bool check_preservation = false;
    bool epoch_debug = false;
    uint64_t fuel = 1'000'000;
    size_t ctable_cap = 65536;
    size_t prompt_depth = 1024;
};

int cmd_run(const std::string& path, const RunFlags& flags) {
    std::string text = read_file(path);
    wasmk::ValidatedModule vm;
    try {
        vm = wasmk::validate(wasmk::parse_module(text));
    } catch (const std::exception& e) {
        std::cerr << red("invalid: ") << e.what() << "\n";
        return kExitSemantic;
    }

    std::string entry = flags.invoke_name;
    if (entry.empty()) {
        for (const char* candidate : {"main", "_start"})
            for (const auto& ex : vm.module.exports)
                if (entry.empty() && ex.name == candidate) entry = candidate;
    }
    if (entry.empty()) {
        std::cerr << "no entry export (need --invoke, main, or _start)\n";
        return kExitUsage;
    }

    std::vector<wasmk::Value> args;
    for (const std::string& a : flags.args) args.push_back(parse_arg(a));

    wasmk::RuntimeLimits limits;
    limits.ctable_capacity = flags.ctable_cap;
    limits.prompt_depth = flags.prompt_depth;
    limits.epoch_debug = flags.epoch_debug;

    std::string sink;
    wasmk::HostRegistry hosts = wasmk::standard_host_registry(&sink);
    wasmk::Outcome outcome;
    try {
        if (flags.engine == "oracle") {
            auto store = wasmk::instantiate<wasmk::OCtx>(vm, hosts, limits);
            wasmk::OracleOptions oo;
            oo.fuel = flags.fuel;
            oo.check_preservation = flags.check_preservation;
            oo.trace = flags.trace;
            wasmk::OracleOutcome oc =
                wasmk::oracle_invoke(store, entry, args, oo);
            std::cout << sink;
            if (oc.out_of_fuel) {
                std::cerr << red("out of fuel") << " after " << oc.steps
                          << " steps\n";
                return kExitSemantic;
            }
            outcome = oc.outcome;
        } else {
            auto store = wasmk::instantiate<wasmk::FastCtx>(vm, hosts, limits);
            outcome = wasmk::invoke(store, entry, args);
            std::cout << sink;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    if (outcome.is_trap()) {
        std::cerr << red("trap: ") << wasmk::name(outcome.trap_kind) << ": "
                  << outcome.trap_message << "\n";
        return kExitSemantic;
    }
    if (!outcome.values.empty())
        std::cout << wasmk::to_string(outcome.values) << "\n";
    return kExitOk;
}

int cmd_test(const std::string& path) {
    std::string text = read_file(path);
    wasmk::Script script;
    try {
        script = wasmk::parse_script(text);
    } catch (const wasmk::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    }
    wasmk::ScriptResult r = wasmk::run_script(script);
    if (!r.ok()) {
        for (const auto& f : r.failures)
            std::cerr << red("FAIL") << " line " << f.line << ": " << f.what
                      << "\n";
        std::cerr << r.failures.size() << " of " << r.directives
                  << " directives failed\n";
        return kExitSemantic;
    }
    std::cout << green("PASS") << " " << r.directives << " directives\n";
    return kExitOk;
}

int cmd_difftest(uint64_t seed, size_t count) {
    wasmk::DifftestOptions opts;
    opts.seed = seed;
    opts.count = count;
    wasmk::DifftestResult r = wasmk::run_difftest(opts);
    if (!r.ok()) {
        std::cerr << red("FAIL") << " " << r.failures << " of " << r.cases
                  << " cases\n"
                  << r.first_failure << "\n";
        return kExitSemantic;
    }
    std::cout << green("PASS") << " " << r.cases << " cases\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"WebAssembly interpreter with delimited continuations"};
    app.require_subcommand(1);

    std::string validate_file;
    CLI::App* validate =
        app.add_subcommand("validate", "type-check a module file");
    validate->add_option("file", validate_file)->required();

    std::string run_file;
    RunFlags flags;
    CLI::App* run = app.add_subcommand("run", "run an exported function");
    run->add_option("file", run_file)->required();
    run->add_option("--invoke", flags.invoke_name, "entry export name");
    run->add_option("--arg", flags.args, "argument, e.g. i64:5");
    run->add_option("--engine", flags.engine, "fast | oracle")
        ->check(CLI::IsMember({"fast", "oracle"}));
    run->add_flag("--trace", flags.trace, "print one line per oracle step");
    run->add_flag("--check-preservation", flags.check_preservation,
                  "assert configuration typing at every oracle step");
    run->add_flag("--epoch-debug", flags.epoch_debug,
                  "trap on stale cross-prompt continuation IDs");
    run->add_option("--fuel", flags.fuel, "oracle step budget")
        ->check(CLI::PositiveNumber);
    run->add_option("--ctable-cap", flags.ctable_cap,
                    "continuation table capacity");
    run->add_option("--prompt-depth", flags.prompt_depth,
                    "prompt stack depth limit");

    std::string test_file;
    CLI::App* test = app.add_subcommand("test", "run a test script");
    test->add_option("file", test_file)->required();

    uint64_t seed = 42;
    size_t count = 500;
    CLI::App* difftest =
        app.add_subcommand("difftest", "differential random testing");
    difftest->add_option("--seed", seed);
    difftest->add_option("--count", count)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(validate_file);
        if (app.got_subcommand(run)) return cmd_run(run_file, flags);
        if (app.got_subcommand(test)) return cmd_test(test_file);
        return cmd_difftest(seed, count);
    } catch (const std::ios_base::failure& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const wasmk::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitSemantic;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitSemantic;
    }
}
