#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "wasmk/runtime.hpp"

using namespace wasmk;

// The prompt-stack transitions are engine-agnostic; an int stands in for a
// captured context.
using Stack = PromptStack<int>;
using Entry = ContinuationEntry<int>;

namespace {

Entry entry(int ctx) { return Entry{ctx, 0, {}}; }

TrapKind trap_kind_of(std::function<void()> f) {
    try {
        f();
    } catch (const Trap& t) {
        return t.kind;
    }
    FAIL("expected a trap");
    return TrapKind::Unreachable;
}

}  // namespace

TEST_CASE("capture allocates the lowest free index and sets the root") {
    Stack s;
    s.prompt_trans();
    CHECK(!s.get_root().has_value());
    uint64_t k0 = s.control_trans(entry(10));
    CHECK(k0 == 0);
    CHECK(s.get_root() == std::optional<uint64_t>{0});
    uint64_t k1 = s.control_trans(entry(11));
    CHECK(k1 == 1);
    // Root stays on the first capture.
    CHECK(s.get_root() == std::optional<uint64_t>{0});
    CHECK(s.top().live_count() == 2);
}

TEST_CASE("restore frees the slot and clears the root only for the root") {
    Stack s;
    s.prompt_trans();
    uint64_t k0 = s.control_trans(entry(10));
    uint64_t k1 = s.control_trans(entry(11));
    Entry e = s.restore_trans(k1);
    CHECK(e.ctx == 11);
    CHECK(s.get_root() == std::optional<uint64_t>{k0});
    e = s.restore_trans(k0);
    CHECK(e.ctx == 10);
    CHECK(!s.get_root().has_value());
    CHECK(s.top().live_count() == 0);
}

TEST_CASE("freed indices are reused lowest-first") {
    Stack s;
    s.prompt_trans();
    s.control_trans(entry(0));
    uint64_t k1 = s.control_trans(entry(1));
    uint64_t k2 = s.control_trans(entry(2));
    s.restore_trans(k1);
    s.delete_trans(k2);
    CHECK(s.control_trans(entry(3)) == 1);
    CHECK(s.control_trans(entry(4)) == 2);
    CHECK(s.control_trans(entry(5)) == 3);
}

TEST_CASE("restore error ordering: root violation before unallocated") {
    Stack s;
    s.prompt_trans();
    // No root at all: even a bogus ID reports the root violation.
    CHECK(trap_kind_of([&] { s.restore_trans(999); }) ==
          TrapKind::RootViolation);
    uint64_t k0 = s.control_trans(entry(10));
    CHECK(trap_kind_of([&] { s.restore_trans(999); }) ==
          TrapKind::UnallocatedContinuation);
    s.restore_trans(k0);
    CHECK(trap_kind_of([&] { s.restore_trans(k0); }) ==
          TrapKind::RootViolation);
}

TEST_CASE("copy refuses the root, duplicates everything else") {
    Stack s;
    s.prompt_trans();
    uint64_t k0 = s.control_trans(entry(10));
    uint64_t k1 = s.control_trans(entry(11));
    CHECK(trap_kind_of([&] { s.copy_trans(k0); }) == TrapKind::RootViolation);
    CHECK(trap_kind_of([&] { s.copy_trans(77); }) ==
          TrapKind::UnallocatedContinuation);
    uint64_t k2 = s.copy_trans(k1);
    CHECK(k2 == 2);
    CHECK(s.get_cont(k2)->ctx == 11);
    // The copy is independent of the original.
    s.restore_trans(k1);
    CHECK(s.get_cont(k2)->ctx == 11);
}

TEST_CASE("delete refuses the root and frees the slot exactly once") {
    Stack s;
    s.prompt_trans();
    uint64_t k0 = s.control_trans(entry(10));
    uint64_t k1 = s.control_trans(entry(11));
    CHECK(trap_kind_of([&] { s.delete_trans(k0); }) ==
          TrapKind::RootViolation);
    s.delete_trans(k1);
    CHECK(trap_kind_of([&] { s.delete_trans(k1); }) ==
          TrapKind::UnallocatedContinuation);
    CHECK(s.top().live_count() == 1);
}

TEST_CASE("table capacity limit") {
    RuntimeLimits limits;
    limits.ctable_capacity = 4;
    Stack s(limits);
    s.prompt_trans();
    for (int i = 0; i < 4; ++i) s.control_trans(entry(i));
    CHECK(trap_kind_of([&] { s.control_trans(entry(4)); }) ==
          TrapKind::ResourceLimit);
    // Freeing a slot makes capture possible again.
    s.delete_trans(2);
    CHECK(s.control_trans(entry(5)) == 2);
}

TEST_CASE("prompt depth limit") {
    RuntimeLimits limits;
    limits.prompt_depth = 3;
    Stack s(limits);
    s.prompt_trans();
    s.prompt_trans();
    s.prompt_trans();
    CHECK(trap_kind_of([&] { s.prompt_trans(); }) == TrapKind::ResourceLimit);
    CHECK(s.depth() == 3);
}

TEST_CASE("prompt end requires a clear root and reports leftovers") {
    Stack s;
    s.prompt_trans();
    uint64_t k0 = s.control_trans(entry(10));
    uint64_t k1 = s.control_trans(entry(11));
    CHECK(trap_kind_of([&] { s.prompt_end_trans(); }) ==
          TrapKind::UnbalancedPrompt);
    s.restore_trans(k0);
    (void)k1;
    s.prompt_end_trans();
    CHECK(s.empty());
    // One entry (k1) was still live when the context was popped.
    CHECK(s.last_popped_live() == 1);
}

TEST_CASE("nested prompts address the top context only") {
    Stack s;
    s.prompt_trans();
    uint64_t outer = s.control_trans(entry(1));
    s.prompt_trans();
    // The inner context is empty: the outer ID does not resolve here.
    CHECK(s.get_cont(outer) == nullptr);
    uint64_t inner = s.control_trans(entry(2));
    CHECK(inner == 0);  // same numeric ID, different context
    CHECK(s.get_cont(inner)->ctx == 2);
    s.restore_trans(inner);
    s.prompt_end_trans();
    CHECK(s.get_cont(outer)->ctx == 1);
    s.restore_trans(outer);
    s.prompt_end_trans();
}

TEST_CASE("epoch debug detects stale cross-prompt IDs") {
    RuntimeLimits limits;
    limits.epoch_debug = true;
    Stack s(limits);
    s.prompt_trans();
    uint64_t outer = s.control_trans(entry(1));
    s.prompt_trans();
    uint64_t inner = s.control_trans(entry(2));
    CHECK(inner != outer);  // epochs disambiguate equal indices
    CHECK((inner & kIndexMask) == (outer & kIndexMask));
    s.restore_trans(inner);
    s.prompt_end_trans();
    // The stale inner ID no longer aliases the outer slot.
    CHECK(s.get_cont(inner) == nullptr);
    CHECK(trap_kind_of([&] { s.restore_trans(inner); }) ==
          TrapKind::UnallocatedContinuation);
    CHECK(s.get_cont(outer)->ctx == 1);
    s.restore_trans(outer);
}

TEST_CASE("truncate discards contexts pushed by a failed invoke") {
    Stack s;
    s.prompt_trans();
    size_t base = s.depth();
    s.prompt_trans();
    s.control_trans(entry(9));
    s.truncate(base);
    CHECK(s.depth() == base);
    CHECK(s.last_popped_live() == 1);
}
