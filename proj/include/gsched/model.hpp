#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "time.hpp"

namespace gsched {

// One GPU segment: a short CPU-side launch/cleanup portion followed by pure
// GPU execution during which the CPU either busy-waits or suspends.
struct GpuSegment {
    time_us misc_cpu = 0; // CPU time to launch kernels / copy data (G^m)
    time_us pure_gpu = 0; // kernel execution time on the GPU (G^e)
};

// A sporadic task alternating CPU and GPU segments:
//   cpu[0], gpu[0], cpu[1], gpu[1], ..., cpu[n]
// so cpu_segments.size() == gpu_segments.size() + 1. Zero-length CPU
// segments are allowed; pure_gpu must be positive. Larger priority value
// means higher priority. Priority fields are ignored when realtime is false.
struct Task {
    int id = 0;
    std::vector<time_us> cpu_segments;
    std::vector<GpuSegment> gpu_segments;
    time_us period = 0;
    time_us deadline = 0;
    int cpu_priority = 0;
    int gpu_priority = 0; // defaults to cpu_priority unless assigned separately
    int core = 0;
    bool realtime = true;
    time_us first_release = 0;

    time_us total_cpu() const {
        return std::accumulate(cpu_segments.begin(), cpu_segments.end(),
                               time_us{0});
    }
    time_us total_misc() const {
        time_us s = 0;
        for (const auto& g : gpu_segments) s += g.misc_cpu;
        return s;
    }
    time_us total_pure() const {
        time_us s = 0;
        for (const auto& g : gpu_segments) s += g.pure_gpu;
        return s;
    }
    time_us total_gpu() const { return total_misc() + total_pure(); }
    // Combined worst-case demand of one job, excluding any overhead terms.
    time_us total_demand() const { return total_cpu() + total_gpu(); }
    int num_gpu_segments() const {
        return static_cast<int>(gpu_segments.size());
    }
    bool uses_gpu() const { return !gpu_segments.empty(); }
};

// Platform and scheduler parameters shared by analysis and simulation.
struct SystemConfig {
    int num_cores = 1;
    time_us slice = 1024;        // GPU round-robin time slice L
    time_us ctx_switch = 200;    // GPU context switch overhead theta
    time_us runlist_update = 1000; // runlist update delay epsilon
};

struct Taskset {
    std::vector<Task> tasks;
    SystemConfig config;

    const Task* find(int id) const {
        for (const auto& t : tasks)
            if (t.id == id) return &t;
        return nullptr;
    }

    // Structural checks. Returns human-readable violations; empty means valid.
    std::vector<std::string> validate() const;

    // Per-core CPU utilization sum((C_i + G^m_i) / T_i), including
    // best-effort tasks. Every core index appears in the map.
    std::map<int, double> per_core_utilization() const;
};

// True when a has strictly higher CPU priority than b. Ties across cores are
// broken by lower id; same-core real-time ties are rejected by validate().
inline bool higher_cpu_priority(const Task& a, const Task& b) {
    if (a.cpu_priority != b.cpu_priority)
        return a.cpu_priority > b.cpu_priority;
    return a.id < b.id;
}

inline std::vector<std::string> Taskset::validate() const {
    std::vector<std::string> v;
    auto err = [&](std::string msg) { v.push_back(std::move(msg)); };

    if (config.num_cores <= 0) err("config: num_cores must be positive");
    if (config.slice <= 0) err("config: slice must be positive");
    if (config.ctx_switch < 0) err("config: ctx_switch must be >= 0");
    if (config.runlist_update < 0)
        err("config: runlist_update must be >= 0");

    std::map<int, int> id_count;
    for (const auto& t : tasks) id_count[t.id]++;
    for (const auto& [id, n] : id_count)
        if (n > 1) err("duplicate task id " + std::to_string(id));

    for (const auto& t : tasks) {
        const std::string who = "task " + std::to_string(t.id);
        if (t.period <= 0) err(who + ": period must be positive");
        if (t.deadline <= 0) err(who + ": deadline must be positive");
        if (t.deadline > t.period)
            err(who + ": deadline must not exceed period");
        if (t.first_release < 0) err(who + ": first_release must be >= 0");
        if (t.core < 0 || t.core >= config.num_cores)
            err(who + ": core " + std::to_string(t.core) + " out of range");
        if (t.cpu_segments.size() != t.gpu_segments.size() + 1)
            err(who + ": needs one more cpu segment than gpu segments");
        for (time_us c : t.cpu_segments)
            if (c < 0) err(who + ": cpu segment must be >= 0");
        for (const auto& g : t.gpu_segments) {
            if (g.misc_cpu < 0) err(who + ": gpu misc_cpu must be >= 0");
            if (g.pure_gpu <= 0) err(who + ": gpu pure_gpu must be positive");
        }
    }

    // Same-core constraints among real-time tasks: distinct CPU priorities,
    // and the GPU priority order must equal the CPU priority order.
    std::map<int, std::vector<const Task*>> by_core;
    for (const auto& t : tasks)
        if (t.realtime) by_core[t.core].push_back(&t);
    for (const auto& [core, list] : by_core) {
        for (size_t i = 0; i < list.size(); ++i) {
            for (size_t j = i + 1; j < list.size(); ++j) {
                const Task& a = *list[i];
                const Task& b = *list[j];
                if (a.cpu_priority == b.cpu_priority) {
                    err("core " + std::to_string(core) + ": tasks " +
                        std::to_string(a.id) + " and " + std::to_string(b.id) +
                        " share cpu_priority " +
                        std::to_string(a.cpu_priority));
                    continue;
                }
                const bool cpu_higher = a.cpu_priority > b.cpu_priority;
                const bool gpu_higher = a.gpu_priority > b.gpu_priority;
                if (a.gpu_priority == b.gpu_priority ||
                    cpu_higher != gpu_higher) {
                    err("core " + std::to_string(core) + ": tasks " +
                        std::to_string(a.id) + " and " + std::to_string(b.id) +
                        " have gpu priority order different from cpu"
                        " priority order");
                }
            }
        }
    }
    return v;
}

inline std::map<int, double> Taskset::per_core_utilization() const {
    std::map<int, double> u;
    for (int c = 0; c < config.num_cores; ++c) u[c] = 0.0;
    for (const auto& t : tasks) {
        const double demand =
            static_cast<double>(t.total_cpu() + t.total_misc());
        u[t.core] += demand / static_cast<double>(t.period);
    }
    return u;
}

} // namespace gsched
