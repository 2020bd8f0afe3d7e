#pragma once

#include "analysis.hpp"

namespace gsched {

// Demand of one job inflated by the runlist updates it issues itself: one
// update entering and one leaving each GPU segment, each costing epsilon on
// the CPU while stalling the GPU until it completes. The same inflation
// applies whether the 2*eta*epsilon is viewed as CPU-side or GPU-side,
// because the update occupies both.
struct InflatedDemand {
    time_us total = 0; // G* : total GPU-related demand
    time_us pure = 0;  // G^e*: pure GPU time plus own updates
    time_us misc = 0;  // G^m*: launch CPU time plus own updates
};

inline InflatedDemand inflated_demands(const Task& t,
                                       const SystemConfig& cfg) {
    const time_us upd = 2 * cfg.runlist_update * t.num_gpu_segments();
    return {t.total_gpu() + upd, t.total_pure() + upd, t.total_misc() + upd};
}

// Priority-inversion blocking from lower-priority runlist updates: one
// in-flight update can delay the job's start, and one can delay each of its
// own GPU segment entries. Applies to CPU-only tasks too (the job-start term).
inline time_us gcaps_blocking(const Task& t, const SystemConfig& cfg) {
    return (t.num_gpu_segments() + 1) * cfg.runlist_update;
}

namespace detail {

// The unified view uses computed response times as release jitter; with
// separately assigned GPU priorities the bounds fall back to deadlines so
// each task's test is independent of the others' (not yet known) responses.
enum class JitterBase { response, deadline };

inline JitterBase jitter_for(const PriorityView& view) {
    return view.mode == PriorityView::Mode::unified ? JitterBase::response
                                                    : JitterBase::deadline;
}

// Base value B_h such that the release jitter is B_h minus the relevant part
// of tau_h's demand. Empty when the needed response time diverged.
inline std::optional<time_us> jitter_base(const Task& h, JitterBase kind,
                                          const ResponseMap& responses) {
    if (kind == JitterBase::deadline) return h.deadline;
    return response_of(responses, h.id);
}

inline bool in_list(const std::vector<const Task*>& list, int id) {
    for (const Task* t : list)
        if (t->id == id) return true;
    return false;
}

// Per-job busy spin of a same-core contributor: its kernels, its own
// updates (both the entry and, when the following CPU stretch is shorter
// than the update queue's drain, the exit land on its critical path), and
// one in-flight lower-priority update tail per segment entry. All of it is
// spun on the shared core at the contributor's priority.
inline time_us busy_spin_demand(const Task& h, const SystemConfig& cfg) {
    return inflated_demands(h, cfg).pure +
           h.num_gpu_segments() * cfg.runlist_update;
}

// Per-job GPU occupancy a higher-GPU-priority contributor imposes on a
// waiting kernel: its pure GPU time plus both serialized runlist updates
// bracketing each of its segments. When a kernel runs underneath, the entry
// update overlaps it, but back-to-back submissions leave the engine
// kernel-idle while updates drain one after another, so the waiter can pay
// both updates of every segment.
inline time_us remote_gpu_demand(const Task& h, const SystemConfig& cfg) {
    return h.total_pure() + 2 * h.num_gpu_segments() * cfg.runlist_update;
}

// Higher-priority GPU demand that can preempt tau_i's own GPU segments.
// Same-core contributors are the CPU-priority-higher tasks; remote
// contributors are ranked by the view's GPU priorities. In suspend mode the
// same-core term uses the uninflated pure GPU time: the contributor's update
// costs already occupy the shared core and are charged once as CPU demand.
inline std::optional<time_us> direct_preempt(const Taskset& ts, int task_id,
                                             time_us r, WaitMode mode,
                                             const PriorityView& view,
                                             const ResponseMap& responses,
                                             JitterBase jitter) {
    const Task* ti = ts.find(task_id);
    if (!ti->uses_gpu()) return 0;
    const auto hpp = same_core_higher_prio(ts, *ti);

    time_us sum = 0;
    for (const Task* h : hpp) {
        if (!h->uses_gpu()) continue;
        if (mode == WaitMode::busy) {
            sum += ceil_div(r, h->period) * busy_spin_demand(*h, ts.config);
        } else {
            // While tau_i sleeps on a kernel, a same-core task is free to
            // run and submit its own kernels, which evict tau_i's just like
            // a remote task's would, so it imposes the same per-segment
            // hand-over cost on top of its pure GPU time.
            const auto base = jitter_base(*h, jitter, responses);
            if (!base) return std::nullopt;
            const time_us jg = *base - h->total_pure();
            sum += ceil_div(r + jg, h->period) * remote_gpu_demand(*h, ts.config);
        }
    }
    for (const auto& h : ts.tasks) {
        if (!h.realtime || h.id == ti->id || !h.uses_gpu()) continue;
        if (in_list(hpp, h.id)) continue;
        if (!higher_gpu_priority(view, h, *ti)) continue;
        const auto base = jitter_base(h, jitter, responses);
        if (!base) return std::nullopt;
        const time_us jg = *base - h.total_pure();
        sum += ceil_div(r + jg, h.period) * remote_gpu_demand(h, ts.config);
    }
    return sum;
}

// Busy-waiting mode, CPU-only tau_i: higher-priority tasks on the same core
// spin on the CPU for as long as their GPU segments take, so tau_i absorbs
// both the spins themselves (same-core term) and whatever higher-GPU-priority
// demand stretches those spins (remote term). GPU-using tasks get all of
// this through the direct-preemption term instead, so they take 0 here.
// A remote kernel can only reach this core by preempting the kernel a
// same-core spinner is waiting on, so the remote term counts tasks that
// outrank the weakest such spinner on the GPU; with no spinner at all,
// remote GPU work never touches this core and the delay is zero. (Same-core
// tasks below tau_i always rank below its spinners on the GPU, so only
// other cores contribute here.)
inline std::optional<time_us> indirect_busy(const Taskset& ts, int task_id,
                                            time_us r,
                                            const PriorityView& view,
                                            const ResponseMap& responses,
                                            JitterBase jitter) {
    const Task* ti = ts.find(task_id);
    if (ti->uses_gpu()) return 0;
    const auto hpp = same_core_higher_prio(ts, *ti);

    time_us sum = 0;
    const Task* weakest = nullptr; // same-core spinner ranked lowest on GPU
    for (const Task* h : hpp) {
        if (!h->uses_gpu()) continue;
        sum += ceil_div(r, h->period) * busy_spin_demand(*h, ts.config);
        if (!weakest || higher_gpu_priority(view, *weakest, *h)) weakest = h;
    }
    if (!weakest) return 0;
    for (const auto& h : ts.tasks) {
        if (!h.realtime || h.core == ti->core || !h.uses_gpu()) continue;
        if (!higher_gpu_priority(view, h, *weakest)) continue;
        const auto base = jitter_base(h, jitter, responses);
        if (!base) return std::nullopt;
        const time_us jg = *base - h.total_pure();
        sum += ceil_div(r + jg, h.period) * remote_gpu_demand(h, ts.config);
    }
    return sum;
}

// Same-core higher-priority CPU demand. Busy mode needs no jitter: the
// spinning contributors never suspend, so their CPU demand arrives
// periodically. In suspend mode GPU-using contributors bunch up after their
// suspensions (jitter J^c_h); their runlist updates run on the GPU side
// while they sleep, so only C + G^m ever lands on the core. CPU-only
// contributors stay periodic in both modes.
inline std::optional<time_us> cpu_preempt(const Taskset& ts, int task_id,
                                          time_us r, WaitMode mode,
                                          const ResponseMap& responses,
                                          JitterBase jitter) {
    const Task* ti = ts.find(task_id);
    time_us sum = 0;
    for (const Task* h : same_core_higher_prio(ts, *ti)) {
        const time_us plain = h->total_cpu() + h->total_misc();
        if (mode == WaitMode::busy || !h->uses_gpu()) {
            sum += ceil_div(r, h->period) * plain;
            continue;
        }
        const auto base = jitter_base(*h, jitter, responses);
        if (!base) return std::nullopt;
        const time_us jc = *base - plain;
        sum += ceil_div(r + jc, h->period) * plain;
    }
    return sum;
}

inline AnalysisResult response_times(const Taskset& ts, WaitMode mode,
                                     const PriorityView& view,
                                     JitterBase jitter) {
    AnalysisResult out;
    out.taskset_schedulable = true;
    out.view = view.mode == PriorityView::Mode::unified ? "unified"
                                                        : "separate";
    ResponseMap responses;

    for (const Task* ti : realtime_by_priority(ts)) {
        out.gpu_priorities[ti->id] = view.gpu_priority(*ti);
        TaskAnalysis ta;
        const time_us own_updates =
            2 * ts.config.runlist_update * ti->num_gpu_segments();
        const time_us blocking = gcaps_blocking(*ti, ts.config);
        const time_us base = ti->total_demand() + own_updates + blocking;
        ta.breakdown.cpu_block = blocking;

        time_us r = base;
        bool dependency_unbounded = false;
        while (true) {
            const auto preempt =
                cpu_preempt(ts, ti->id, r, mode, responses, jitter);
            const auto direct = direct_preempt(ts, ti->id, r, mode, view,
                                               responses, jitter);
            std::optional<time_us> indirect = 0;
            if (mode == WaitMode::busy)
                indirect =
                    indirect_busy(ts, ti->id, r, view, responses, jitter);
            if (!preempt || !direct || !indirect) {
                dependency_unbounded = true;
                break;
            }
            ta.breakdown.cpu_preempt = *preempt;
            ta.breakdown.gpu_direct = *direct;
            ta.breakdown.gpu_indirect = *indirect;
            const time_us next = base + *preempt + *direct + *indirect;
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

} // namespace detail

inline std::optional<time_us> gcaps_direct_preempt(
    const Taskset& ts, int task_id, time_us r, WaitMode mode,
    const PriorityView& view, const ResponseMap& responses) {
    return detail::direct_preempt(ts, task_id, r, mode, view, responses,
                                  detail::jitter_for(view));
}

inline std::optional<time_us> gcaps_indirect_busy(
    const Taskset& ts, int task_id, time_us r, const PriorityView& view,
    const ResponseMap& responses) {
    return detail::indirect_busy(ts, task_id, r, view, responses,
                                 detail::jitter_for(view));
}

inline std::optional<time_us> gcaps_cpu_preempt(const Taskset& ts,
                                                int task_id, time_us r,
                                                WaitMode mode,
                                                const PriorityView& view,
                                                const ResponseMap& responses) {
    return detail::cpu_preempt(ts, task_id, r, mode, responses,
                               detail::jitter_for(view));
}

// Fixed-point response-time analysis under preemptive priority-driven GPU
// context scheduling. Each job's own demand is inflated by its two runlist
// updates per GPU segment plus priority-inversion blocking; on top of that
// come same-core CPU preemption, direct GPU preemption of its own segments,
// and (busy mode, CPU-only tasks) the stretched busy-waits of same-core
// higher-priority tasks. Round-robin interleaving does not exist here.
inline AnalysisResult gcaps_response_times(const Taskset& ts, WaitMode mode,
                                           const PriorityView& view) {
    return detail::response_times(ts, mode, view, detail::jitter_for(view));
}

} // namespace gsched
