#pragma once

#include "gsched/model.hpp"

namespace fixtures {

using gsched::GpuSegment;
using gsched::SystemConfig;
using gsched::Task;
using gsched::time_us;

// Terse task builder for hand-made analysis fixtures (all values in us).
inline Task mk_task(int id, int core, int prio, std::vector<time_us> cpu,
                    std::vector<GpuSegment> gpu, time_us period,
                    time_us deadline = 0) {
    Task t;
    t.id = id;
    t.core = core;
    t.cpu_priority = prio;
    t.gpu_priority = prio;
    t.cpu_segments = std::move(cpu);
    t.gpu_segments = std::move(gpu);
    t.period = period;
    t.deadline = deadline > 0 ? deadline : period;
    return t;
}

inline Task mk_best_effort(int id, int core, std::vector<time_us> cpu,
                           std::vector<GpuSegment> gpu, time_us period) {
    Task t = mk_task(id, core, 0, std::move(cpu), std::move(gpu), period);
    t.realtime = false;
    return t;
}

inline SystemConfig mk_config(int cores, time_us slice, time_us ctx,
                              time_us update) {
    SystemConfig cfg;
    cfg.num_cores = cores;
    cfg.slice = slice;
    cfg.ctx_switch = ctx;
    cfg.runlist_update = update;
    return cfg;
}

} // namespace fixtures
