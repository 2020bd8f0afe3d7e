#pragma once

#include "rta_gcaps.hpp"

namespace gsched {

struct GpuPriorityAssignment {
    std::map<int, int> gpu_priorities; // real-time task id -> priority level
    bool feasible = false;
};

// Returns a copy of the taskset with the assignment's GPU priorities applied.
inline Taskset apply_gpu_priorities(const Taskset& ts,
                                    const std::map<int, int>& assignment) {
    Taskset out = ts;
    for (auto& t : out.tasks) {
        auto it = assignment.find(t.id);
        if (it != assignment.end()) t.gpu_priority = it->second;
    }
    return out;
}

namespace detail {

// Shared state of one level-by-level search for GPU priority levels.
// Levels are handed out bottom-up; a task may take the lowest remaining
// level only if it is the lowest-CPU-priority unassigned task on its core,
// which keeps every per-core GPU order equal to the CPU order.
struct LevelSearch {
    const Taskset& ts;
    WaitMode mode;
    const std::vector<const Task*>& rt;
    long budget; // remaining analysis calls before the search gives up

    int n() const { return static_cast<int>(rt.size()); }

    std::vector<const Task*> eligible(const std::map<int, int>& assigned) {
        std::vector<const Task*> out;
        for (const Task* t : rt) {
            if (assigned.count(t->id)) continue;
            bool lowest_on_core = true;
            for (const Task* o : rt) {
                if (o->id == t->id || assigned.count(o->id)) continue;
                if (o->core == t->core && higher_cpu_priority(*t, *o))
                    lowest_on_core = false;
            }
            if (lowest_on_core) out.push_back(t);
        }
        std::sort(out.begin(), out.end(), [](const Task* a, const Task* b) {
            if (a->cpu_priority != b->cpu_priority)
                return a->cpu_priority < b->cpu_priority;
            return a->id < b->id;
        });
        return out;
    }

    // Tests the candidate at the given level with all still-unassigned tasks
    // ranked above it. Only the stretched-spin term depends on the order
    // inside that block (how remote tasks rank against the candidate's
    // same-core spinners), so ranking the spinners at the top yields the
    // candidate's best reachable bound and ranking them at the bottom its
    // worst. A worst-case pass therefore survives any completion, while a
    // best-case failure rules out every completion.
    bool test(const std::map<int, int>& assigned, const Task* c, int level,
              bool best_case) {
        if (budget-- <= 0) return false;
        std::unordered_map<int, int> trial;
        for (const auto& [id, lvl] : assigned) trial[id] = lvl;
        trial[c->id] = level;
        int above = n() + 1;
        const auto own_spinner = [&](const Task* t) {
            return t->core == c->core && t->uses_gpu();
        };
        for (const Task* t : rt)
            if (!trial.count(t->id) && own_spinner(t) != best_case)
                trial[t->id] = ++above;
        for (const Task* t : rt)
            if (!trial.count(t->id)) trial[t->id] = ++above;
        const auto result =
            gcaps_response_times(ts, mode, PriorityView::separate(trial));
        return result.per_task.at(c->id).schedulable;
    }

    // Best reachable bound for a still-unassigned task under the partial
    // assignment: ranked above every other unassigned task (immaterial for
    // a CPU-only task, whose level no term references). A failure here is
    // final for the whole subtree, since deeper nodes only pin more of the
    // order and can never lower the task's minimum.
    bool viable(const std::map<int, int>& assigned, const Task* u) {
        return test(assigned, u, 2 * n() + 2, true);
    }

    // Greedy pass with worst-case tests: every accepted level stays valid
    // through the final analysis, so a complete assignment needs no second
    // look. For tests that do not depend on the block's internal order
    // (every suspend-mode test, and busy-mode tests of GPU-using tasks)
    // worst and best case coincide and this greedy search already finds an
    // assignment whenever any constraint-respecting order works.
    std::optional<std::map<int, int>> greedy() {
        std::map<int, int> assigned;
        for (int level = 1; level <= n(); ++level) {
            const Task* chosen = nullptr;
            for (const Task* c : eligible(assigned)) {
                if (test(assigned, c, level, false)) {
                    chosen = c;
                    break;
                }
            }
            if (!chosen) return std::nullopt;
            assigned[chosen->id] = level;
        }
        return assigned;
    }

    // Depth-first search over candidate choices with best-case tests: a
    // best-case failure prunes exactly (no completion can save the task),
    // and complete assignments are confirmed with the full analysis before
    // being returned. Within the budget this explores every
    // constraint-respecting order the greedy pass may have skipped.
    //
    // Branching is only ever needed between GPU-using candidates. A
    // CPU-only task's level appears in no term of any task (it is neither
    // a spinner nor a remote contributor) and its own bound depends only
    // on how the GPU users above it end up ordered, so if a CPU-only
    // candidate passes it can take the level outright (any feasible order
    // rearranges to one where it sits this low), and if it fails no choice
    // at this level can save it.
    std::optional<std::map<int, int>> dfs(std::map<int, int>& assigned,
                                          int level) {
        if (level > n()) {
            if (budget-- <= 0) return std::nullopt;
            const Taskset applied = apply_gpu_priorities(ts, assigned);
            if (gcaps_response_times(applied, mode, PriorityView::separate())
                    .taskset_schedulable)
                return assigned;
            return std::nullopt;
        }
        const auto elig = eligible(assigned);
        for (const Task* c : elig) {
            if (c->uses_gpu()) continue;
            if (!test(assigned, c, level, true)) return std::nullopt;
            assigned[c->id] = level;
            auto found = dfs(assigned, level + 1);
            if (!found) assigned.erase(c->id);
            return found;
        }
        // All candidates use the GPU; committing one reshuffles what the
        // rest can still reach, so check every unassigned task's best case
        // first and then branch.
        for (const Task* u : rt) {
            if (budget <= 0) return std::nullopt;
            if (assigned.count(u->id)) continue;
            if (!viable(assigned, u)) return std::nullopt;
        }
        for (const Task* c : elig) {
            if (budget <= 0) return std::nullopt;
            if (!test(assigned, c, level, true)) continue;
            assigned[c->id] = level;
            auto found = dfs(assigned, level + 1);
            if (found) return found;
            assigned.erase(c->id);
        }
        return std::nullopt;
    }
};

} // namespace detail

// Searches for GPU priorities, distinct from the CPU ones, under which every
// real-time task passes the separate-view response-time test (deadline-based
// jitters). A greedy bottom-up pass runs first; in busy mode, where the
// stretched-spin term makes some tests depend on the order of tasks ranked
// above (so the greedy pass can miss workable orders), a budgeted
// backtracking pass follows.
//
// If the taskset already passes with GPU priorities equal to CPU priorities,
// that identity assignment is returned unchanged.
inline GpuPriorityAssignment assign_gpu_priorities(const Taskset& ts,
                                                   WaitMode mode) {
    std::vector<const Task*> rt;
    for (const auto& t : ts.tasks)
        if (t.realtime) rt.push_back(&t);

    std::unordered_map<int, int> identity;
    for (const Task* t : rt) identity[t->id] = t->cpu_priority;
    const auto id_result =
        gcaps_response_times(ts, mode, PriorityView::separate(identity));
    if (id_result.taskset_schedulable) {
        GpuPriorityAssignment out;
        out.feasible = true;
        for (const Task* t : rt) out.gpu_priorities[t->id] = t->cpu_priority;
        return out;
    }

    detail::LevelSearch search{ts, mode, rt, 20000};
    auto found = search.greedy();
    if (!found && mode == WaitMode::busy) {
        std::map<int, int> assigned;
        found = search.dfs(assigned, 1);
    }
    if (!found) return {};

    GpuPriorityAssignment out;
    out.feasible = true;
    out.gpu_priorities = std::move(*found);
    return out;
}

} // namespace gsched
