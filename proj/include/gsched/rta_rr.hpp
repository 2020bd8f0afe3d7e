#pragma once

#include "analysis.hpp"

namespace gsched {

// Worst-case extra delay a pure-GPU burst of length ge suffers under
// time-sliced round-robin GPU arbitration when nu other contexts hold
// runlist entries: each of the ceil(ge / L) slices the burst needs can be
// preceded by nu foreign slices, each costing a context switch plus a full
// slice. A zero-length burst needs no slices and suffers nothing.
inline time_us interleave_delay(int nu, time_us ge, const SystemConfig& cfg) {
    return (cfg.slice + cfg.ctx_switch) * nu * ceil_div(ge, cfg.slice);
}

// Round-robin arbitration cannot tell which contexts belong to real-time
// work, so every other GPU-using task (best-effort included) counts as a
// competitor for the slicing of tau_i's own GPU segments.
inline time_us rr_interleaved(const Taskset& ts, int task_id) {
    const Task* ti = ts.find(task_id);
    int nu = 0;
    for (const auto& t : ts.tasks)
        if (t.id != ti->id && t.uses_gpu()) nu++;
    time_us sum = 0;
    for (const auto& g : ti->gpu_segments)
        sum += interleave_delay(nu, g.pure_gpu, ts.config);
    return sum;
}

// Busy-waiting mode only: a higher-priority task tau_h on the same core
// occupies the CPU while its own GPU segments are being sliced, and that
// stretched busy-wait lands on tau_i. The competitor count for tau_h's
// segments excludes tasks that cannot overlap with the wait (tau_i's other
// same-core higher-priority tasks are already accounted for separately) but
// always includes tau_h itself.
inline time_us rr_indirect_busy(const Taskset& ts, int task_id, time_us r) {
    const Task* ti = ts.find(task_id);
    const auto hpp = same_core_higher_prio(ts, *ti);
    auto in_hpp = [&](const Task& t) {
        for (const Task* h : hpp)
            if (h->id == t.id) return true;
        return false;
    };
    int outside = 0; // GPU-using tasks outside hpp(tau_i), tau_i included
    for (const auto& t : ts.tasks)
        if (t.uses_gpu() && !in_hpp(t)) outside++;

    time_us sum = 0;
    for (const Task* h : hpp) {
        if (!h->uses_gpu()) continue;
        const int nu = outside + 1; // the union adds tau_h itself
        time_us per_job = 0;
        for (const auto& g : h->gpu_segments)
            per_job += interleave_delay(nu, g.pure_gpu, ts.config);
        sum += ceil_div(r, h->period) * per_job;
    }
    return sum;
}

// Same-core higher-priority CPU demand. In suspend mode a GPU-using
// higher-priority task's completions can bunch up after its suspensions,
// which is modeled as release jitter J^c_h = R_h - (C_h + G^m_h); its own
// response time must already be known. CPU-only contributors never suspend
// and stay periodic in both modes. Returns nothing when a needed bound is
// itself unbounded.
inline std::optional<time_us> rr_cpu_preempt(const Taskset& ts, int task_id,
                                             time_us r, WaitMode mode,
                                             const ResponseMap& responses) {
    const Task* ti = ts.find(task_id);
    time_us sum = 0;
    for (const Task* h : same_core_higher_prio(ts, *ti)) {
        const time_us demand = h->total_cpu() + h->total_misc();
        time_us window = r;
        if (mode == WaitMode::suspend && h->uses_gpu()) {
            const auto rh = response_of(responses, h->id);
            if (!rh) return std::nullopt;
            window += *rh - demand; // J^c_h
        }
        sum += ceil_div(window, h->period) * demand;
    }
    return sum;
}

// Fixed-point response-time analysis under the default time-sliced
// round-robin GPU policy. Tasks are processed in decreasing CPU priority so
// suspension jitters of higher-priority tasks are available. GPU segments
// never preempt each other here, so there is no direct GPU preemption term
// and no priority-inversion blocking; interleaving hits in both wait modes,
// busy-wait stretching only in busy mode.
inline AnalysisResult rr_response_times(const Taskset& ts, WaitMode mode) {
    AnalysisResult out;
    out.taskset_schedulable = true;
    ResponseMap responses;

    for (const Task* ti : realtime_by_priority(ts)) {
        TaskAnalysis ta;
        const time_us base = ti->total_demand();
        const time_us interleave = rr_interleaved(ts, ti->id);
        ta.breakdown.gpu_interleave = interleave;

        time_us r = base;
        bool dependency_unbounded = false;
        while (true) {
            const auto preempt =
                rr_cpu_preempt(ts, ti->id, r, mode, responses);
            if (!preempt) {
                dependency_unbounded = true;
                break;
            }
            const time_us indirect =
                mode == WaitMode::busy ? rr_indirect_busy(ts, ti->id, r) : 0;
            ta.breakdown.cpu_preempt = *preempt;
            ta.breakdown.gpu_indirect = indirect;
            const time_us next = base + *preempt + indirect + interleave;
            if (next == r) break;
            r = next;
            if (r > ti->deadline) break;
        }

        if (!dependency_unbounded && r <= ti->deadline) {
            ta.wcrt = r;
            ta.schedulable = true;
        } else {
            out.taskset_schedulable = false;
        }
        responses[ti->id] = ta.wcrt;
        out.per_task.emplace(ti->id, std::move(ta));
    }
    return out;
}

} // namespace gsched
