#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "model.hpp"

namespace gsched {

enum class WaitMode { busy, suspend };

inline const char* to_string(WaitMode m) {
    return m == WaitMode::busy ? "busy" : "suspend";
}

// How a task waits out its pure-GPU time decides which interference terms
// apply, so every per-task bound carries its composition for inspection.
struct InterferenceBreakdown {
    time_us cpu_preempt = 0;    // higher-priority CPU demand on the same core
    time_us cpu_block = 0;      // priority-inversion blocking (runlist updates)
    time_us gpu_direct = 0;     // higher-priority GPU demand hitting own segments
    time_us gpu_indirect = 0;   // GPU demand stretching same-core busy-waits
    time_us gpu_interleave = 0; // round-robin slicing of own GPU segments
};

struct TaskAnalysis {
    // Empty when the fixed point exceeded the deadline (reported "unbounded")
    // or when a needed higher-priority bound was itself unbounded.
    std::optional<time_us> wcrt;
    InterferenceBreakdown breakdown;
    bool schedulable = false;
};

struct AnalysisResult {
    std::map<int, TaskAnalysis> per_task; // real-time tasks only, by id
    bool taskset_schedulable = false;
    // Filled by the GPU-priority aware analysis: which priority view produced
    // this result and the GPU priorities it used.
    std::string view;
    std::map<int, int> gpu_priorities;
};

// Selects which priorities drive the GPU-side interference terms. The
// unified view forces gpu == cpu priority; the separate view uses the tasks'
// gpu_priority fields unless an override map is supplied (used while
// searching for an assignment).
struct PriorityView {
    enum class Mode { unified, separate };
    Mode mode = Mode::unified;
    std::unordered_map<int, int> overrides;

    static PriorityView unified() { return {}; }
    static PriorityView separate(std::unordered_map<int, int> ov = {}) {
        return {Mode::separate, std::move(ov)};
    }

    int gpu_priority(const Task& t) const {
        if (mode == Mode::unified) return t.cpu_priority;
        auto it = overrides.find(t.id);
        return it != overrides.end() ? it->second : t.gpu_priority;
    }
};

inline bool higher_gpu_priority(const PriorityView& view, const Task& a,
                                const Task& b) {
    const int pa = view.gpu_priority(a);
    const int pb = view.gpu_priority(b);
    if (pa != pb) return pa > pb;
    return a.id < b.id;
}

// Thrown when a per-task interference term needs the response time of a
// higher-priority task that has not been computed yet; callers must process
// tasks in decreasing CPU priority order.
struct analysis_order_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Response times computed so far, by task id. A present-but-empty entry means
// the task's bound diverged; anything depending on it is unbounded too.
using ResponseMap = std::map<int, std::optional<time_us>>;

inline std::optional<time_us> response_of(const ResponseMap& responses,
                                          int id) {
    auto it = responses.find(id);
    if (it == responses.end())
        throw analysis_order_error(
            "response time of task " + std::to_string(id) +
            " not available; analyze tasks in decreasing cpu priority order");
    return it->second;
}

// Real-time tasks on the same core with strictly higher CPU priority.
inline std::vector<const Task*> same_core_higher_prio(const Taskset& ts,
                                                      const Task& ti) {
    std::vector<const Task*> out;
    for (const auto& t : ts.tasks)
        if (t.realtime && t.id != ti.id && t.core == ti.core &&
            higher_cpu_priority(t, ti))
            out.push_back(&t);
    return out;
}

// Real-time tasks ordered by decreasing CPU priority (the order in which
// response times must be computed).
inline std::vector<const Task*> realtime_by_priority(const Taskset& ts) {
    std::vector<const Task*> out;
    for (const auto& t : ts.tasks)
        if (t.realtime) out.push_back(&t);
    std::sort(out.begin(), out.end(), [](const Task* a, const Task* b) {
        return higher_cpu_priority(*a, *b);
    });
    return out;
}

} // namespace gsched
