#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gen.hpp"
#include "sim.hpp"

namespace gsched {

using nlohmann::json;

// Durations cross the file boundary in milliseconds (fractions allowed,
// microsecond resolution); everything internal stays integer microseconds.

inline json taskset_to_json(const Taskset& ts) {
    json j;
    j["config"] = {{"num_cores", ts.config.num_cores},
                   {"slice_ms", us_to_ms(ts.config.slice)},
                   {"theta_ms", us_to_ms(ts.config.ctx_switch)},
                   {"epsilon_ms", us_to_ms(ts.config.runlist_update)}};
    j["tasks"] = json::array();
    for (const Task& t : ts.tasks) {
        json jt;
        jt["id"] = t.id;
        jt["core"] = t.core;
        jt["realtime"] = t.realtime;
        jt["cpu_priority"] = t.cpu_priority;
        jt["gpu_priority"] = t.gpu_priority;
        jt["period_ms"] = us_to_ms(t.period);
        jt["deadline_ms"] = us_to_ms(t.deadline);
        jt["first_release_ms"] = us_to_ms(t.first_release);
        jt["cpu_segments_ms"] = json::array();
        for (time_us c : t.cpu_segments)
            jt["cpu_segments_ms"].push_back(us_to_ms(c));
        jt["gpu_segments"] = json::array();
        for (const GpuSegment& g : t.gpu_segments)
            jt["gpu_segments"].push_back({{"gm_ms", us_to_ms(g.misc_cpu)},
                                          {"ge_ms", us_to_ms(g.pure_gpu)}});
        j["tasks"].push_back(jt);
    }
    return j;
}

inline Taskset taskset_from_json(const json& j) {
    Taskset ts;
    const json& c = j.at("config");
    ts.config.num_cores = c.at("num_cores").get<int>();
    ts.config.slice = ms_to_us(c.at("slice_ms").get<double>());
    ts.config.ctx_switch = ms_to_us(c.at("theta_ms").get<double>());
    ts.config.runlist_update = ms_to_us(c.at("epsilon_ms").get<double>());
    for (const json& jt : j.at("tasks")) {
        Task t;
        t.id = jt.at("id").get<int>();
        t.core = jt.at("core").get<int>();
        t.realtime = jt.value("realtime", true);
        t.cpu_priority = jt.at("cpu_priority").get<int>();
        t.gpu_priority = jt.value("gpu_priority", t.cpu_priority);
        t.period = ms_to_us(jt.at("period_ms").get<double>());
        t.deadline = jt.contains("deadline_ms")
                         ? ms_to_us(jt.at("deadline_ms").get<double>())
                         : t.period;
        t.first_release = ms_to_us(jt.value("first_release_ms", 0.0));
        for (const json& s : jt.at("cpu_segments_ms"))
            t.cpu_segments.push_back(ms_to_us(s.get<double>()));
        if (jt.contains("gpu_segments"))
            for (const json& s : jt.at("gpu_segments"))
                t.gpu_segments.push_back(
                    {ms_to_us(s.at("gm_ms").get<double>()),
                     ms_to_us(s.at("ge_ms").get<double>())});
        ts.tasks.push_back(std::move(t));
    }
    return ts;
}

inline json range_to_json(const Range<int>& r) { return json{r.lo, r.hi}; }
inline json range_to_json(const Range<double>& r) { return json{r.lo, r.hi}; }

template <class T> Range<T> range_from_json(const json& j) {
    if (j.is_array()) return {j.at(0).get<T>(), j.at(1).get<T>()};
    return {j.get<T>(), j.get<T>()}; // scalar: degenerate range
}

inline json gen_params_to_json(const GenParams& p) {
    json j;
    j["num_cores"] = p.num_cores;
    j["tasks_per_core"] = range_to_json(p.tasks_per_core);
    j["gpu_task_ratio"] = range_to_json(p.gpu_task_ratio);
    j["util_per_core"] = range_to_json(p.util_per_core);
    j["period_ms"] = range_to_json(p.period_ms);
    j["gpu_segments_per_task"] = range_to_json(p.gpu_segments_per_task);
    j["g_to_c_ratio"] = range_to_json(p.g_to_c_ratio);
    j["gm_in_g_ratio"] = range_to_json(p.gm_in_g_ratio);
    j["epsilon_ms"] = p.epsilon_ms;
    j["theta_ms"] = p.theta_ms;
    j["slice_ms"] = p.slice_ms;
    j["best_effort_ratio"] = p.best_effort_ratio;
    j["period_dist"] =
        p.period_dist == PeriodDist::uniform ? "uniform" : "log_uniform";
    j["seed"] = p.seed;
    return j;
}

inline GenParams gen_params_from_json(const json& j) {
    GenParams p; // missing keys keep their defaults
    if (j.contains("num_cores")) p.num_cores = j["num_cores"].get<int>();
    if (j.contains("tasks_per_core"))
        p.tasks_per_core = range_from_json<int>(j["tasks_per_core"]);
    if (j.contains("gpu_task_ratio"))
        p.gpu_task_ratio = range_from_json<double>(j["gpu_task_ratio"]);
    if (j.contains("util_per_core"))
        p.util_per_core = range_from_json<double>(j["util_per_core"]);
    if (j.contains("period_ms"))
        p.period_ms = range_from_json<double>(j["period_ms"]);
    if (j.contains("gpu_segments_per_task"))
        p.gpu_segments_per_task =
            range_from_json<int>(j["gpu_segments_per_task"]);
    if (j.contains("g_to_c_ratio"))
        p.g_to_c_ratio = range_from_json<double>(j["g_to_c_ratio"]);
    if (j.contains("gm_in_g_ratio"))
        p.gm_in_g_ratio = range_from_json<double>(j["gm_in_g_ratio"]);
    if (j.contains("epsilon_ms")) p.epsilon_ms = j["epsilon_ms"].get<double>();
    if (j.contains("theta_ms")) p.theta_ms = j["theta_ms"].get<double>();
    if (j.contains("slice_ms")) p.slice_ms = j["slice_ms"].get<double>();
    if (j.contains("best_effort_ratio"))
        p.best_effort_ratio = j["best_effort_ratio"].get<double>();
    if (j.contains("period_dist")) {
        const std::string d = j["period_dist"].get<std::string>();
        if (d == "uniform")
            p.period_dist = PeriodDist::uniform;
        else if (d == "log_uniform")
            p.period_dist = PeriodDist::log_uniform;
        else
            throw std::invalid_argument("unknown period_dist: " + d);
    }
    if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
    return p;
}

inline json analysis_to_json(const AnalysisResult& r) {
    json j;
    if (!r.view.empty()) j["view"] = r.view;
    if (!r.gpu_priorities.empty()) {
        json gp = json::object();
        for (const auto& [id, prio] : r.gpu_priorities)
            gp[std::to_string(id)] = prio;
        j["gpu_priorities"] = gp;
    }
    j["taskset_schedulable"] = r.taskset_schedulable;
    json tasks = json::object();
    for (const auto& [id, a] : r.per_task) {
        json jt;
        if (a.wcrt)
            jt["wcrt_ms"] = us_to_ms(*a.wcrt);
        else
            jt["wcrt_ms"] = "unbounded";
        jt["schedulable"] = a.schedulable;
        jt["breakdown"] = {
            {"cpu_preempt_ms", us_to_ms(a.breakdown.cpu_preempt)},
            {"cpu_block_ms", us_to_ms(a.breakdown.cpu_block)},
            {"gpu_direct_ms", us_to_ms(a.breakdown.gpu_direct)},
            {"gpu_indirect_ms", us_to_ms(a.breakdown.gpu_indirect)},
            {"gpu_interleave_ms", us_to_ms(a.breakdown.gpu_interleave)}};
        tasks[std::to_string(id)] = jt;
    }
    j["tasks"] = tasks;
    return j;
}

inline std::string analysis_to_csv(const AnalysisResult& r) {
    std::ostringstream os;
    os << "task,wcrt_ms,schedulable,cpu_preempt_ms,cpu_block_ms,"
          "gpu_direct_ms,gpu_indirect_ms,gpu_interleave_ms\n";
    for (const auto& [id, a] : r.per_task) {
        os << id << ',';
        if (a.wcrt)
            os << us_to_ms(*a.wcrt);
        else
            os << "unbounded";
        os << ',' << (a.schedulable ? 1 : 0) << ','
           << us_to_ms(a.breakdown.cpu_preempt) << ','
           << us_to_ms(a.breakdown.cpu_block) << ','
           << us_to_ms(a.breakdown.gpu_direct) << ','
           << us_to_ms(a.breakdown.gpu_indirect) << ','
           << us_to_ms(a.breakdown.gpu_interleave) << '\n';
    }
    return os.str();
}

inline json sim_result_to_json(const SimResult& r) {
    json j;
    j["horizon_below_hyperperiod"] = r.horizon_below_hyperperiod;
    if (!r.invariant_violations.empty())
        j["invariant_violations"] = r.invariant_violations;
    json tasks = json::object();
    for (const auto& [id, s] : r.per_task)
        tasks[std::to_string(id)] = {{"mort_ms", us_to_ms(s.mort)},
                                     {"mean_ms", s.mean / 1000.0},
                                     {"min_ms", us_to_ms(s.min)},
                                     {"jobs", s.jobs},
                                     {"misses", s.misses}};
    j["tasks"] = tasks;
    return j;
}

inline std::string sim_result_to_csv(const SimResult& r) {
    std::ostringstream os;
    os << "task,mort_ms,mean_ms,min_ms,jobs,misses\n";
    for (const auto& [id, s] : r.per_task)
        os << id << ',' << us_to_ms(s.mort) << ',' << s.mean / 1000.0 << ','
           << us_to_ms(s.min) << ',' << s.jobs << ',' << s.misses << '\n';
    return os.str();
}

inline std::string trace_to_csv(const std::vector<Event>& trace) {
    std::ostringstream os;
    os << "time_us,event,task,job\n";
    for (const Event& e : trace)
        os << e.time << ',' << to_string(e.kind) << ',' << e.task << ','
           << e.job << '\n';
    return os.str();
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

inline void write_text_file(const std::string& path,
                            const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

inline void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

} // namespace gsched
