#pragma once

#include <cmath>
#include <stdexcept>

#include "model.hpp"
#include "rng.hpp"

namespace gsched {

struct generation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename T> struct Range {
    T lo{};
    T hi{};
};

enum class PeriodDist { uniform, log_uniform };

// Knobs for random taskset generation. Defaults reproduce the evaluation
// setup: 4 cores, 3-6 tasks per core, 40-60% of tasks GPU-using, 0.4-0.6
// utilization per core, periods 30-500 ms, 1-3 GPU segments per GPU task,
// GPU/CPU demand ratio 0.2-2, launch share 10-30% of GPU demand, with
// epsilon 1 ms, theta 0.2 ms and a 1.024 ms round-robin slice.
struct GenParams {
    int num_cores = 4;
    Range<int> tasks_per_core{3, 6};
    Range<double> gpu_task_ratio{0.4, 0.6};
    Range<double> util_per_core{0.4, 0.6};
    Range<double> period_ms{30.0, 500.0};
    Range<int> gpu_segments_per_task{1, 3};
    Range<double> g_to_c_ratio{0.2, 2.0};
    Range<double> gm_in_g_ratio{0.1, 0.3};
    double epsilon_ms = 1.0;
    double theta_ms = 0.2;
    double slice_ms = 1.024;
    double best_effort_ratio = 0.0;
    PeriodDist period_dist = PeriodDist::uniform;
    std::uint64_t seed = 0;
};

// Classic utilization splitting: recursively peels a uniformly distributed
// share off the remaining sum, giving a uniform distribution over the
// n-part simplex scaled to `total`.
inline std::vector<double> uunifast(int n, double total, Rng& rng) {
    std::vector<double> u(n);
    double remaining = total;
    for (int i = 0; i < n - 1; ++i) {
        const double next =
            remaining * std::pow(rng.real01(), 1.0 / (n - 1 - i));
        u[i] = remaining - next;
        remaining = next;
    }
    u[n - 1] = remaining;
    return u;
}

namespace detail {

// Uniform split of `total` microseconds into `parts` non-negative integer
// pieces (uniform over the simplex, then rounded so the pieces sum exactly).
inline std::vector<time_us> split_uniform(time_us total, int parts,
                                          Rng& rng) {
    if (parts == 1) return {total};
    std::vector<double> cuts(parts - 1);
    for (auto& c : cuts) c = rng.real01();
    std::sort(cuts.begin(), cuts.end());
    std::vector<time_us> out(parts);
    time_us used = 0;
    double prev = 0.0;
    for (int i = 0; i < parts - 1; ++i) {
        out[i] = static_cast<time_us>(
            std::llround((cuts[i] - prev) * static_cast<double>(total)));
        prev = cuts[i];
        used += out[i];
    }
    out[parts - 1] = total - used;
    return out;
}

} // namespace detail

// Generates one random taskset. The draw order is fixed, so identical
// parameters and seed reproduce the identical taskset:
//   1. per core: task count and target utilization, then a UUniFast split;
//   2. one GPU-using ratio for the whole set, then a random subset of tasks;
//   3. per task: period (deadline = period), GPU segment count, demand
//      u*T split into CPU and GPU parts by the drawn G/C ratio, the GPU
//      part split into launch and kernel shares, and uniform splits across
//      segments (per-task redraw on degenerate splits, bounded retries);
//   4. rate-monotonic CPU priorities across the whole set (GPU = CPU);
//   5. worst-fit decreasing reallocation of tasks to cores on (C+G^m)/T;
//   6. a best-effort share of tasks stripped of real-time status.
inline Taskset generate_taskset(const GenParams& p) {
    Rng rng(p.seed);
    Taskset ts;
    ts.config.num_cores = p.num_cores;
    ts.config.slice = ms_to_us(p.slice_ms);
    ts.config.ctx_switch = ms_to_us(p.theta_ms);
    ts.config.runlist_update = ms_to_us(p.epsilon_ms);

    std::vector<double> utils;
    std::vector<int> cores;
    for (int c = 0; c < p.num_cores; ++c) {
        const int m = static_cast<int>(
            rng.integer(p.tasks_per_core.lo, p.tasks_per_core.hi));
        const double target = rng.real(p.util_per_core.lo, p.util_per_core.hi);
        for (double u : uunifast(m, target, rng)) {
            utils.push_back(u);
            cores.push_back(c);
        }
    }
    const int n = static_cast<int>(utils.size());

    const double ratio = rng.real(p.gpu_task_ratio.lo, p.gpu_task_ratio.hi);
    const int n_gpu = static_cast<int>(std::llround(ratio * n));
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<bool> gpu_using(n, false);
    for (int i = 0; i < n_gpu; ++i) gpu_using[order[i]] = true;

    for (int i = 0; i < n; ++i) {
        if (utils[i] > 1.0)
            throw generation_error("task utilization exceeds 1; per-core"
                                   " utilization target too high");
        Task t;
        t.id = i + 1;
        t.core = cores[i];
        bool ok = false;
        for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
            const double period =
                p.period_dist == PeriodDist::uniform
                    ? rng.real(p.period_ms.lo, p.period_ms.hi)
                    : std::exp(rng.real(std::log(p.period_ms.lo),
                                        std::log(p.period_ms.hi)));
            t.period = ms_to_us(period);
            t.deadline = t.period;
            const time_us demand = static_cast<time_us>(
                std::llround(utils[i] * static_cast<double>(t.period)));
            if (!gpu_using[i]) {
                t.cpu_segments = {demand};
                t.gpu_segments.clear();
                ok = true;
                break;
            }
            const int segs = static_cast<int>(rng.integer(
                p.gpu_segments_per_task.lo, p.gpu_segments_per_task.hi));
            const double gc = rng.real(p.g_to_c_ratio.lo, p.g_to_c_ratio.hi);
            const double gm_share =
                rng.real(p.gm_in_g_ratio.lo, p.gm_in_g_ratio.hi);
            const time_us c_total = static_cast<time_us>(
                std::llround(static_cast<double>(demand) / (1.0 + gc)));
            const time_us g_total = demand - c_total;
            t.cpu_segments = detail::split_uniform(c_total, segs + 1, rng);
            const auto g_parts = detail::split_uniform(g_total, segs, rng);
            t.gpu_segments.clear();
            bool segs_ok = true;
            for (time_us g : g_parts) {
                GpuSegment s;
                s.misc_cpu = static_cast<time_us>(
                    std::llround(gm_share * static_cast<double>(g)));
                s.pure_gpu = g - s.misc_cpu;
                if (s.pure_gpu <= 0) segs_ok = false;
                t.gpu_segments.push_back(s);
            }
            ok = segs_ok;
        }
        if (!ok)
            throw generation_error(
                "could not draw positive GPU segments for task " +
                std::to_string(t.id));
        ts.tasks.push_back(std::move(t));
    }

    // Rate-monotonic priorities across the whole set, ties by lower id.
    std::vector<int> by_period(n);
    for (int i = 0; i < n; ++i) by_period[i] = i;
    std::sort(by_period.begin(), by_period.end(), [&](int a, int b) {
        if (ts.tasks[a].period != ts.tasks[b].period)
            return ts.tasks[a].period < ts.tasks[b].period;
        return ts.tasks[a].id < ts.tasks[b].id;
    });
    for (int rank = 0; rank < n; ++rank) {
        Task& t = ts.tasks[by_period[rank]];
        t.cpu_priority = n - rank;
        t.gpu_priority = t.cpu_priority;
    }

    // Worst-fit decreasing on (C + G^m) / T: heaviest first into the
    // currently least-loaded core.
    std::vector<int> by_util(n);
    for (int i = 0; i < n; ++i) by_util[i] = i;
    auto item_util = [&](int i) {
        const Task& t = ts.tasks[i];
        return static_cast<double>(t.total_cpu() + t.total_misc()) /
               static_cast<double>(t.period);
    };
    std::sort(by_util.begin(), by_util.end(), [&](int a, int b) {
        const double ua = item_util(a), ub = item_util(b);
        if (ua != ub) return ua > ub;
        return ts.tasks[a].id < ts.tasks[b].id;
    });
    std::vector<double> load(p.num_cores, 0.0);
    for (int i : by_util) {
        int best = 0;
        for (int c = 1; c < p.num_cores; ++c)
            if (load[c] < load[best]) best = c;
        ts.tasks[i].core = best;
        load[best] += item_util(i);
    }

    const int n_be = static_cast<int>(std::llround(p.best_effort_ratio * n));
    std::vector<int> be_order(n);
    for (int i = 0; i < n; ++i) be_order[i] = i;
    rng.shuffle(be_order);
    for (int i = 0; i < n_be; ++i) ts.tasks[be_order[i]].realtime = false;

    const auto violations = ts.validate();
    if (!violations.empty())
        throw generation_error("generated taskset invalid: " + violations[0]);
    return ts;
}

// The four-task two-core example set used throughout the tests: three tasks
// share core 0, one heavy GPU task sits alone on core 1 with a 70 ms offset.
inline Taskset table2_taskset() {
    Taskset ts;
    ts.config.num_cores = 2;
    ts.config.slice = ms_to_us(1.024);
    ts.config.ctx_switch = ms_to_us(0.2);
    ts.config.runlist_update = ms_to_us(1.0);

    auto mk = [](int id, int core, double period, std::vector<double> cpu,
                 std::vector<std::pair<double, double>> gpu, int prio,
                 double first_release) {
        Task t;
        t.id = id;
        t.core = core;
        t.period = ms_to_us(period);
        t.deadline = t.period;
        for (double c : cpu) t.cpu_segments.push_back(ms_to_us(c));
        for (auto [gm, ge] : gpu)
            t.gpu_segments.push_back({ms_to_us(gm), ms_to_us(ge)});
        t.cpu_priority = prio;
        t.gpu_priority = prio;
        t.first_release = ms_to_us(first_release);
        return t;
    };
    ts.tasks.push_back(mk(1, 0, 80, {2, 4, 3}, {{2, 4}, {2, 2}}, 4, 0));
    ts.tasks.push_back(mk(2, 0, 150, {40}, {}, 3, 0));
    ts.tasks.push_back(mk(3, 1, 190, {4, 30}, {{5, 80}}, 2, 70));
    ts.tasks.push_back(mk(4, 0, 200, {16, 2}, {{2, 10}}, 1, 0));
    return ts;
}

} // namespace gsched
