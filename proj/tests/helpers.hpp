#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "wasmk/interpreter.hpp"
#include "wasmk/oracle.hpp"
#include "wasmk/parser.hpp"

namespace testutil {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture(const std::string& name) {
    return std::string(FIXTURES_DIR) + "/" + name;
}

inline std::string corpus(const std::string& name) {
    return std::string(CORPUS_DIR) + "/" + name;
}

// Both engines instantiated from one module, each with its own host output
// sink. Heap-only: the registries capture pointers to the sink members.
struct Engines {
    wasmk::ValidatedModule vm;
    std::string fast_out, oracle_out;
    std::unique_ptr<wasmk::FastStore> fast;
    std::unique_ptr<wasmk::OracleStore> oracle;
    wasmk::HostRegistry fast_hosts, oracle_hosts;
};

inline std::unique_ptr<Engines> make_engines(const std::string& text,
                                             wasmk::RuntimeLimits limits = {}) {
    auto e = std::make_unique<Engines>();
    e->vm = wasmk::validate(wasmk::parse_module(text));
    e->fast_hosts = wasmk::standard_host_registry(&e->fast_out);
    e->oracle_hosts = wasmk::standard_host_registry(&e->oracle_out);
    e->fast = std::make_unique<wasmk::FastStore>(
        wasmk::instantiate<wasmk::FastCtx>(e->vm, e->fast_hosts, limits));
    e->oracle = std::make_unique<wasmk::OracleStore>(
        wasmk::instantiate<wasmk::OCtx>(e->vm, e->oracle_hosts, limits));
    return e;
}

struct BothOutcomes {
    wasmk::Outcome fast;
    wasmk::Outcome oracle;
    bool out_of_fuel = false;

    bool agree() const { return fast.same_observable(oracle); }
};

inline BothOutcomes invoke_both(Engines& e, const std::string& name,
                                std::vector<wasmk::Value> args = {},
                                bool check_preservation = true) {
    BothOutcomes r;
    r.fast = wasmk::invoke(*e.fast, name, args);
    wasmk::OracleOptions oo;
    oo.check_preservation = check_preservation;
    wasmk::OracleOutcome oc = wasmk::oracle_invoke(*e.oracle, name, args, oo);
    r.oracle = oc.outcome;
    r.out_of_fuel = oc.out_of_fuel;
    return r;
}

// One expected invocation from a corpus args.txt file.
struct CorpusInvoke {
    std::string name;
    std::vector<wasmk::Value> args;
    bool expect_trap = false;
    std::string trap_kind;
    std::vector<wasmk::Value> results;
};

inline wasmk::Value parse_value(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
        throw std::runtime_error("bad value spec " + s);
    std::string type = s.substr(0, colon);
    std::string num = s.substr(colon + 1);
    if (type == "i32")
        return wasmk::Value::i32(
            static_cast<uint32_t>(std::stoll(num, nullptr, 0)));
    if (type == "i64")
        return wasmk::Value::i64(
            static_cast<uint64_t>(std::stoll(num, nullptr, 0)));
    if (type == "f32") return wasmk::Value::f32(std::stof(num));
    if (type == "f64") return wasmk::Value::f64(std::stod(num));
    throw std::runtime_error("bad value type " + type);
}

inline std::vector<CorpusInvoke> parse_args_file(const std::string& path) {
    std::vector<CorpusInvoke> out;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "invoke") {
            CorpusInvoke ci;
            ls >> ci.name;
            out.push_back(std::move(ci));
        } else if (word == "arg") {
            std::string spec;
            ls >> spec;
            out.back().args.push_back(parse_value(spec));
        } else if (word == "result") {
            std::string spec;
            ls >> spec;
            if (spec != "none") out.back().results.push_back(parse_value(spec));
        } else if (word == "trap") {
            out.back().expect_trap = true;
            ls >> out.back().trap_kind;
        } else {
            throw std::runtime_error("bad args.txt line: " + line);
        }
    }
    return out;
}

}  // namespace testutil
