#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wasmk/embedding.hpp"
#include "wasmk/validator.hpp"
#include "wasmk/value.hpp"

namespace wasmk {

struct RuntimeLimits {
    size_t ctable_capacity = 65536;
    size_t prompt_depth = 1024;
    // Tag continuation IDs with the owning prompt's epoch so a stale ID
    // (captured under a prompt that has since ended) traps deterministically
    // instead of silently aliasing an entry of the enclosing table.
    bool epoch_debug = false;
};

// Continuation IDs under epoch_debug: (epoch << kEpochShift) | table index.
inline constexpr unsigned kEpochShift = 20;
inline constexpr uint64_t kIndexMask = (uint64_t{1} << kEpochShift) - 1;

// A captured full-stack context. Ctx is engine-specific: the fast engine
// stores suspended frames, the oracle stores a literal context term. Either
// way, plugging a value into the hole and resuming must behave like the
// captured computation continuing with that value.
template <class Ctx>
struct ContinuationEntry {
    Ctx ctx;
    uint32_t inst = 0;
    std::vector<ValueType> type;  // config type recorded at capture
};

// One dynamic prompt scope: a table of entries-or-nil plus the root ID.
// The table grows lazily toward the configured capacity; free_list holds
// exactly the nil slots among the grown ones.
template <class Ctx>
struct PromptContext {
    std::vector<std::optional<ContinuationEntry<Ctx>>> ctable;
    std::optional<uint64_t> root;
    std::set<uint64_t> free_list;
    uint64_t epoch = 0;

    size_t live_count() const {
        size_t n = 0;
        for (const auto& e : ctable) n += e.has_value();
        return n;
    }
};

template <class Ctx>
class PromptStack {
public:
    explicit PromptStack(RuntimeLimits limits = {}) : limits_(limits) {
        assert(!limits_.epoch_debug ||
               limits_.ctable_capacity <= (kIndexMask + 1));
    }

    const RuntimeLimits& limits() const { return limits_; }
    size_t depth() const { return stack_.size(); }
    bool empty() const { return stack_.empty(); }

    PromptContext<Ctx>& top() {
        assert(!stack_.empty());
        return stack_.back();
    }
    const PromptContext<Ctx>& context(size_t i) const { return stack_[i]; }

    // Live entries of the most recently popped context, for post-run
    // inspection of the implicit prompt's table.
    size_t last_popped_live() const { return last_popped_live_; }

    std::optional<uint64_t> get_root() { return top().root; }
    void set_root(std::optional<uint64_t> r) { top().root = r; }

    ContinuationEntry<Ctx>* get_cont(uint64_t id) {
        PromptContext<Ctx>& p = top();
        uint64_t idx = decode(id);
        if (idx >= p.ctable.size() || !p.ctable[idx]) return nullptr;
        return &*p.ctable[idx];
    }

    uint64_t control_trans(ContinuationEntry<Ctx> entry) {
        uint64_t idx = alloc();
        top().ctable[idx] = std::move(entry);
        uint64_t id = encode(idx);
        if (!top().root) top().root = id;
        check_invariants();
        return id;
    }

    ContinuationEntry<Ctx> restore_trans(uint64_t id) {
        if (!get_root())
            throw Trap{TrapKind::RootViolation,
                       "restore while the root continuation is executing"};
        ContinuationEntry<Ctx>* e = get_cont(id);
        if (!e)
            throw Trap{TrapKind::UnallocatedContinuation,
                       "restore of unallocated continuation " + id_str(id)};
        ContinuationEntry<Ctx> out = std::move(*e);
        free_slot(decode(id));
        if (top().root == id) top().root = std::nullopt;
        check_invariants();
        return out;
    }

    uint64_t copy_trans(uint64_t id) {
        if (get_root() == std::optional<uint64_t>{id})
            throw Trap{TrapKind::RootViolation,
                       "copy of the root continuation"};
        ContinuationEntry<Ctx>* e = get_cont(id);
        if (!e)
            throw Trap{TrapKind::UnallocatedContinuation,
                       "copy of unallocated continuation " + id_str(id)};
        ContinuationEntry<Ctx> dup = *e;  // deep copy
        uint64_t idx = alloc();           // may invalidate e
        top().ctable[idx] = std::move(dup);
        check_invariants();
        return encode(idx);
    }

    void delete_trans(uint64_t id) {
        if (get_root() == std::optional<uint64_t>{id})
            throw Trap{TrapKind::RootViolation,
                       "delete of the root continuation"};
        if (!get_cont(id))
            throw Trap{TrapKind::UnallocatedContinuation,
                       "delete of unallocated continuation " + id_str(id)};
        free_slot(decode(id));
        check_invariants();
    }

    void prompt_trans() {
        if (stack_.size() >= limits_.prompt_depth)
            throw Trap{TrapKind::ResourceLimit,
                       "prompt depth limit (" +
                           std::to_string(limits_.prompt_depth) +
                           ") exceeded"};
        PromptContext<Ctx> p;
        p.epoch = next_epoch_++;
        stack_.push_back(std::move(p));
    }

    void prompt_end_trans() {
        assert(!stack_.empty());
        if (top().root)
            throw Trap{TrapKind::UnbalancedPrompt,
                       "prompt ended while its root continuation is "
                       "suspended"};
        last_popped_live_ = top().live_count();
        stack_.pop_back();
    }

    // Trap unwinding: discard contexts pushed within the failed invoke.
    void truncate(size_t target_depth) {
        assert(target_depth <= stack_.size());
        while (stack_.size() > target_depth) {
            last_popped_live_ = top().live_count();
            stack_.pop_back();
        }
    }

    void check_invariants() const {
        const PromptContext<Ctx>& p = stack_.back();
        for (uint64_t i = 0; i < p.ctable.size(); ++i)
            assert(p.free_list.count(i) == !p.ctable[i]);
        if (p.root) {
            uint64_t idx = *p.root & (limits_.epoch_debug ? kIndexMask : ~0ULL);
            assert(idx < p.ctable.size() && p.ctable[idx]);
        }
    }

private:
    RuntimeLimits limits_;
    std::vector<PromptContext<Ctx>> stack_;
    uint64_t next_epoch_ = 1;
    size_t last_popped_live_ = 0;

    static std::string id_str(uint64_t id) {
        return std::to_string(static_cast<int64_t>(id));
    }

    uint64_t encode(uint64_t idx) {
        if (!limits_.epoch_debug) return idx;
        return (top().epoch << kEpochShift) | idx;
    }

    // Returns an index that is out of range for stale or oversized IDs, so
    // lookups uniformly miss.
    uint64_t decode(uint64_t id) {
        if (!limits_.epoch_debug) return id;
        if ((id >> kEpochShift) != top().epoch) return UINT64_MAX;
        return id & kIndexMask;
    }

    uint64_t alloc() {
        PromptContext<Ctx>& p = top();
        if (!p.free_list.empty()) {
            uint64_t idx = *p.free_list.begin();
            p.free_list.erase(p.free_list.begin());
            return idx;
        }
        if (p.ctable.size() >= limits_.ctable_capacity)
            throw Trap{TrapKind::ResourceLimit,
                       "continuation table capacity (" +
                           std::to_string(limits_.ctable_capacity) +
                           ") exceeded"};
        p.ctable.emplace_back();
        return p.ctable.size() - 1;
    }

    void free_slot(uint64_t idx) {
        PromptContext<Ctx>& p = top();
        p.ctable[idx].reset();
        p.free_list.insert(idx);
    }
};

// A linked instance: code plus its runtime state. Function index space is
// imports first, then module functions.
struct Instance {
    const ValidatedModule* module = nullptr;
    std::vector<const HostFunction*> host_funcs;  // one per import
    std::vector<Value> globals;
    std::vector<uint32_t> table;  // UINT32_MAX = uninitialized element
    std::vector<uint8_t> memory;

    bool is_host(uint32_t func_index) const {
        return func_index < host_funcs.size();
    }
    const FuncType& func_type(uint32_t func_index) const {
        return module->func_type(func_index);
    }
    const FuncDecl& func(uint32_t func_index) const {
        return module->module.funcs[func_index - host_funcs.size()];
    }
    std::optional<uint32_t> find_export(const std::string& name) const {
        for (const ExportDecl& e : module->module.exports)
            if (e.name == name) return e.func_index;
        return std::nullopt;
    }
};

// Throws std::runtime_error on link failure (missing/mistyped import).
Instance link_instance(const ValidatedModule& module,
                       const HostRegistry& hosts);

template <class Ctx>
struct Store {
    Instance instance;
    PromptStack<Ctx> pstack;
};

template <class Ctx>
Store<Ctx> instantiate(const ValidatedModule& module,
                       const HostRegistry& hosts, RuntimeLimits limits = {}) {
    return Store<Ctx>{link_instance(module, hosts), PromptStack<Ctx>(limits)};
}

}  // namespace wasmk
