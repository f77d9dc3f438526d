#include "wasmk/script.hpp"

#include <memory>

namespace wasmk {

namespace {

std::string outcome_str(const Outcome& o) { return to_string(o); }

}  // namespace

ScriptResult run_script(const Script& script, const ScriptOptions& options) {
    ScriptResult result;

    // Engine state for the current module; the validated module must
    // outlive both stores.
    std::unique_ptr<ValidatedModule> current;
    std::string fast_out, oracle_out;
    HostRegistry fast_hosts = standard_host_registry(&fast_out);
    HostRegistry oracle_hosts = standard_host_registry(&oracle_out);
    std::unique_ptr<FastStore> fast_store;
    std::unique_ptr<OracleStore> oracle_store;

    auto fail = [&](int line, std::string what) {
        result.failures.push_back({line, std::move(what)});
    };

    for (const Directive& d : script.directives) {
        ++result.directives;
        switch (d.kind) {
        case Directive::Kind::ModuleDef: {
            try {
                current =
                    std::make_unique<ValidatedModule>(validate(d.module));
            } catch (const ValidationError& e) {
                fail(d.line, std::string("module invalid: ") + e.what());
                current.reset();
                fast_store.reset();
                oracle_store.reset();
                break;
            }
            try {
                fast_store = std::make_unique<FastStore>(
                    instantiate<FastCtx>(*current, fast_hosts,
                                         options.limits));
                oracle_store = std::make_unique<OracleStore>(
                    instantiate<OCtx>(*current, oracle_hosts,
                                      options.limits));
            } catch (const std::exception& e) {
                fail(d.line, std::string("instantiation failed: ") + e.what());
                fast_store.reset();
                oracle_store.reset();
            }
            break;
        }
        case Directive::Kind::AssertInvalid: {
            try {
                validate(d.module);
                fail(d.line, "assert_invalid: module validated");
            } catch (const ValidationError& e) {
                if (std::string(e.what()).find(d.message) ==
                    std::string::npos)
                    fail(d.line, "assert_invalid: error \"" +
                                     std::string(e.what()) +
                                     "\" does not mention \"" + d.message +
                                     "\"");
            }
            break;
        }
        case Directive::Kind::AssertReturn:
        case Directive::Kind::AssertTrap: {
            if (!fast_store || !oracle_store) {
                fail(d.line, "no module instantiated");
                break;
            }
            Outcome fast = invoke(*fast_store, d.invoke.export_name,
                                  d.invoke.args);
            OracleOptions oo;
            oo.fuel = options.fuel;
            oo.check_preservation = options.check_preservation;
            OracleOutcome oracle = oracle_invoke(
                *oracle_store, d.invoke.export_name, d.invoke.args, oo);
            if (oracle.out_of_fuel) {
                fail(d.line, "oracle ran out of fuel");
                break;
            }
            if (!fast.same_observable(oracle.outcome)) {
                fail(d.line, "engines disagree: fast " + outcome_str(fast) +
                                 ", oracle " + outcome_str(oracle.outcome));
                break;
            }
            if (fast_out != oracle_out) {
                fail(d.line, "engines disagree on host output");
                break;
            }
            if (d.kind == Directive::Kind::AssertReturn) {
                if (fast.is_trap() || fast.values != d.expected)
                    fail(d.line, "expected " + to_string(d.expected) +
                                     ", got " + outcome_str(fast));
            } else {
                if (!fast.is_trap())
                    fail(d.line, "expected trap \"" + d.message +
                                     "\", got " + outcome_str(fast));
                else if (outcome_str(fast).find(d.message) ==
                         std::string::npos)
                    fail(d.line, "trap " + outcome_str(fast) +
                                     " does not mention \"" + d.message +
                                     "\"");
            }
            break;
        }
        }
    }
    if (options.host_output) *options.host_output = fast_out;
    return result;
}

}  // namespace wasmk
