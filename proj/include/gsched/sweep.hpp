#pragma once

#include <sstream>

#include "gen.hpp"
#include "prio_assign.hpp"
#include "rta_rr.hpp"
#include "sim.hpp"

namespace gsched {

// An analysis method: GPU policy x wait mode, with the `_sep` variants
// falling back to a searched GPU-priority assignment when the plain
// (GPU priority == CPU priority) test fails.
enum class Method {
    gcaps_busy,
    gcaps_suspend,
    gcaps_busy_sep,
    gcaps_suspend_sep,
    tsg_rr_busy,
    tsg_rr_suspend,
};

inline const char* to_string(Method m) {
    switch (m) {
    case Method::gcaps_busy: return "gcaps_busy";
    case Method::gcaps_suspend: return "gcaps_suspend";
    case Method::gcaps_busy_sep: return "gcaps_busy_sep";
    case Method::gcaps_suspend_sep: return "gcaps_suspend_sep";
    case Method::tsg_rr_busy: return "tsg_rr_busy";
    case Method::tsg_rr_suspend: return "tsg_rr_suspend";
    }
    return "?";
}

inline std::optional<Method> parse_method(const std::string& s) {
    for (Method m :
         {Method::gcaps_busy, Method::gcaps_suspend, Method::gcaps_busy_sep,
          Method::gcaps_suspend_sep, Method::tsg_rr_busy,
          Method::tsg_rr_suspend})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

inline std::vector<Method> all_methods() {
    return {Method::gcaps_busy,     Method::gcaps_suspend,
            Method::gcaps_busy_sep, Method::gcaps_suspend_sep,
            Method::tsg_rr_busy,    Method::tsg_rr_suspend};
}

inline WaitMode wait_mode_of(Method m) {
    switch (m) {
    case Method::gcaps_busy:
    case Method::gcaps_busy_sep:
    case Method::tsg_rr_busy:
        return WaitMode::busy;
    default:
        return WaitMode::suspend;
    }
}

inline GpuPolicy policy_of(Method m) {
    switch (m) {
    case Method::tsg_rr_busy:
    case Method::tsg_rr_suspend:
        return GpuPolicy::tsg_rr;
    default:
        return GpuPolicy::gcaps;
    }
}

// Runs the method's schedulability analysis. For `_sep` methods the unified
// test runs first; if it fails, a GPU-priority assignment search runs and,
// when feasible, the result of the separate-view analysis under the found
// assignment is returned (taskset-schedulable by construction).
inline AnalysisResult analyze_with_method(const Taskset& ts, Method m) {
    const WaitMode mode = wait_mode_of(m);
    if (policy_of(m) == GpuPolicy::tsg_rr) return rr_response_times(ts, mode);

    AnalysisResult unified =
        gcaps_response_times(ts, mode, PriorityView::unified());
    if (m == Method::gcaps_busy || m == Method::gcaps_suspend ||
        unified.taskset_schedulable)
        return unified;

    const GpuPriorityAssignment found = assign_gpu_priorities(ts, mode);
    if (!found.feasible) return unified;
    const Taskset assigned = apply_gpu_priorities(ts, found.gpu_priorities);
    return gcaps_response_times(assigned, mode, PriorityView::separate());
}

// ---- acceptance-ratio sweeps ----

struct SweepSpec {
    GenParams base;
    std::string param; // util_per_core, gpu_task_ratio, best_effort_ratio,
                       // epsilon_ms or theta_ms
    std::vector<double> values;
    std::vector<Method> methods = all_methods();
    int sets_per_point = 200;
};

struct SweepCell {
    Method method = Method::gcaps_suspend;
    double value = 0.0;
    long accepted = 0;
    long total = 0;
    double ratio() const {
        return total > 0 ? static_cast<double>(accepted) /
                               static_cast<double>(total)
                         : 0.0;
    }
};

struct SweepResult {
    std::string param;
    std::vector<SweepCell> cells;
};

namespace detail {

inline Range<double> shift_range(Range<double> r, double mid, double dom_lo,
                                 double dom_hi) {
    const double w = r.hi - r.lo;
    double lo = mid - w / 2.0;
    double hi = mid + w / 2.0;
    if (lo < dom_lo) {
        lo = dom_lo;
        hi = dom_lo + w;
    }
    if (hi > dom_hi) {
        hi = dom_hi;
        lo = dom_hi - w;
    }
    return {std::max(lo, dom_lo), hi};
}

} // namespace detail

// Moves one generation knob to `value`. Ranged knobs keep their width: the
// range is re-centered on the value and clamped to the knob's domain.
inline GenParams with_sweep_value(GenParams p, const std::string& param,
                                  double value) {
    if (param == "util_per_core")
        p.util_per_core =
            detail::shift_range(p.util_per_core, value, 0.01, 1.0);
    else if (param == "gpu_task_ratio")
        p.gpu_task_ratio =
            detail::shift_range(p.gpu_task_ratio, value, 0.0, 1.0);
    else if (param == "best_effort_ratio")
        p.best_effort_ratio = std::clamp(value, 0.0, 1.0);
    else if (param == "epsilon_ms")
        p.epsilon_ms = std::max(0.0, value);
    else if (param == "theta_ms")
        p.theta_ms = std::max(0.0, value);
    else
        throw std::invalid_argument("unknown sweep parameter: " + param);
    return p;
}

// Generates a taskset from `p` with a seed derived from (base seed, index);
// the rare degenerate draw is retried with a further-derived seed.
inline Taskset generate_indexed(GenParams p, std::uint64_t base_seed,
                                std::uint64_t index) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        p.seed = split_seed(split_seed(base_seed, index), attempt);
        try {
            return generate_taskset(p);
        } catch (const generation_error&) {
            if (attempt >= 32) throw;
        }
    }
}

// For every sweep point, the same generated tasksets are analyzed under all
// requested methods, so per-point ratios are directly comparable.
inline SweepResult run_sweep(const SweepSpec& spec) {
    SweepResult out;
    out.param = spec.param;
    for (size_t pi = 0; pi < spec.values.size(); ++pi) {
        const double value = spec.values[pi];
        const GenParams p = with_sweep_value(spec.base, spec.param, value);
        std::vector<SweepCell> cells(spec.methods.size());
        for (size_t mi = 0; mi < spec.methods.size(); ++mi)
            cells[mi] = {spec.methods[mi], value, 0, 0};
        for (int k = 0; k < spec.sets_per_point; ++k) {
            const std::uint64_t index =
                pi * static_cast<std::uint64_t>(spec.sets_per_point) +
                static_cast<std::uint64_t>(k);
            const Taskset ts = generate_indexed(p, spec.base.seed, index);
            for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
                const AnalysisResult r =
                    analyze_with_method(ts, spec.methods[mi]);
                cells[mi].total++;
                if (r.taskset_schedulable) cells[mi].accepted++;
            }
        }
        for (auto& c : cells) out.cells.push_back(c);
    }
    return out;
}

inline std::string sweep_to_csv(const SweepResult& r) {
    std::ostringstream os;
    os << "method,param,value,accepted,total,ratio\n";
    for (const SweepCell& c : r.cells)
        os << to_string(c.method) << ',' << r.param << ',' << c.value << ','
           << c.accepted << ',' << c.total << ',' << c.ratio() << '\n';
    return os.str();
}

// ---- analysis-vs-simulation soundness harness ----

struct SoundnessViolation {
    std::uint64_t set_index = 0;
    Method method = Method::gcaps_suspend;
    ReleasePattern pattern = ReleasePattern::synchronous;
    std::uint64_t sim_seed = 0;
    int task = 0;
    time_us observed = 0;
    time_us bound = 0;
};

struct SoundnessReport {
    long tasksets = 0;
    long comparisons = 0; // (task, sim run) pairs checked
    std::vector<SoundnessViolation> violations;
};

// Every analysis-schedulable task's worst observed response time, over a
// synchronous release run and several seeded sporadic runs, must stay within
// its analytic bound.
inline SoundnessReport
check_soundness(const GenParams& base, int num_sets, std::vector<Method> methods,
                time_us horizon = 2'000'000, std::uint64_t seed = 0x5eed) {
    SoundnessReport report;
    struct Run {
        ReleasePattern pattern;
        std::uint64_t seed;
    };
    const std::vector<Run> runs = {{ReleasePattern::synchronous, 0},
                                   {ReleasePattern::sporadic, 1},
                                   {ReleasePattern::sporadic, 2},
                                   {ReleasePattern::sporadic, 3}};

    for (int k = 0; k < num_sets; ++k) {
        const Taskset ts =
            generate_indexed(base, seed, static_cast<std::uint64_t>(k));
        report.tasksets++;
        for (Method m : methods) {
            const AnalysisResult res = analyze_with_method(ts, m);
            bool any_schedulable = false;
            for (const auto& [id, ta] : res.per_task)
                if (ta.schedulable) any_schedulable = true;
            if (!any_schedulable) continue;

            Taskset simts = ts;
            if (res.view == "separate")
                simts = apply_gpu_priorities(ts, res.gpu_priorities);

            for (const Run& run : runs) {
                SimConfig sc;
                sc.policy = policy_of(m);
                sc.wait_mode = wait_mode_of(m);
                sc.horizon = horizon;
                sc.pattern = run.pattern;
                sc.seed = run.seed;
                if (run.pattern == ReleasePattern::sporadic) {
                    sc.jitter_lo = 0.0;
                    sc.jitter_hi = 0.2;
                }
                const SimResult sim = simulate(simts, sc);
                for (const auto& [id, ta] : res.per_task) {
                    if (!ta.schedulable) continue;
                    report.comparisons++;
                    const auto it = sim.per_task.find(id);
                    if (it == sim.per_task.end()) continue;
                    if (it->second.mort > *ta.wcrt)
                        report.violations.push_back(
                            {static_cast<std::uint64_t>(k), m, run.pattern,
                             run.seed, id, it->second.mort, *ta.wcrt});
                }
            }
        }
    }
    return report;
}

} // namespace gsched
