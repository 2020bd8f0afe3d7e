// Command-line front end: taskset generation, schedulability analysis,
// scheduler simulation, GPU-priority assignment, acceptance-ratio sweeps and
// an analysis-vs-simulation soundness harness.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input, 3 a soundness or
// trace-invariant violation was found.

#include <iostream>

#include <CLI11.hpp>

#include "gsched/serialize.hpp"
#include "gsched/sweep.hpp"

namespace {

using namespace gsched;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitViolation = 3;

struct invalid_input : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

Taskset load_taskset(const std::string& path) {
    Taskset ts;
    try {
        ts = taskset_from_json(read_json_file(path));
    } catch (const std::exception& e) {
        throw invalid_input(std::string("cannot read taskset: ") + e.what());
    }
    const auto violations = ts.validate();
    if (!violations.empty()) {
        std::string msg = "invalid taskset:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw invalid_input(msg);
    }
    return ts;
}

GenParams load_gen_params(const std::string& path) {
    if (path.empty()) return GenParams{};
    try {
        return gen_params_from_json(read_json_file(path));
    } catch (const std::exception& e) {
        throw invalid_input(std::string("cannot read generator config: ") +
                            e.what());
    }
}

ReleasePattern parse_pattern(const std::string& s) {
    if (s == "synchronous") return ReleasePattern::synchronous;
    if (s == "periodic_with_offsets")
        return ReleasePattern::periodic_with_offsets;
    if (s == "sporadic") return ReleasePattern::sporadic;
    throw invalid_input("unknown release pattern: " + s);
}

std::vector<std::string> method_names() {
    std::vector<std::string> names;
    for (Method m : all_methods()) names.push_back(to_string(m));
    return names;
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<Method> out;
    for (const auto& n : names) {
        const auto m = parse_method(n);
        if (!m) throw invalid_input("unknown method: " + n);
        out.push_back(*m);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schedulability analysis and simulation for multi-core "
                 "real-time tasksets sharing one GPU"};
    app.require_subcommand(1);

    // ---- gen ----
    std::string gen_config, gen_out;
    std::uint64_t gen_seed = 0;
    bool gen_seed_set = false;
    int gen_count = 1;
    auto* gen = app.add_subcommand("gen", "Generate random tasksets");
    gen->add_option("--config", gen_config,
                    "Generator parameters (JSON file)");
    gen->add_option("--seed", gen_seed, "Generator seed")
        ->each([&](const std::string&) { gen_seed_set = true; });
    gen->add_option("--count", gen_count, "Number of tasksets")
        ->check(CLI::PositiveNumber);
    gen->add_option("--out", gen_out,
                    "Output file (with --count > 1, a prefix producing "
                    "<prefix>_<k>.json)");

    // ---- analyze ----
    std::string an_input, an_method, an_out, an_format = "json";
    auto* an = app.add_subcommand(
        "analyze", "Worst-case response-time analysis of a taskset");
    an->add_option("--input", an_input, "Taskset (JSON file)")->required();
    an->add_option("--method", an_method, "Analysis method")
        ->required()
        ->check(CLI::IsMember(method_names()));
    an->add_option("--format", an_format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    an->add_option("--out", an_out, "Output file (default stdout)");

    // ---- simulate ----
    std::string si_input, si_policy = "gcaps", si_mode = "suspend";
    std::string si_pattern = "synchronous", si_out, si_format = "json";
    std::string si_trace;
    double si_horizon_ms = 2000.0;
    double si_jitter_lo = 0.0, si_jitter_hi = 0.2;
    std::uint64_t si_seed = 0;
    bool si_check = false;
    auto* si = app.add_subcommand("simulate",
                                  "Discrete-event scheduler simulation");
    si->add_option("--input", si_input, "Taskset (JSON file)")->required();
    si->add_option("--policy", si_policy, "GPU scheduling policy")
        ->check(CLI::IsMember({"gcaps", "tsg_rr"}));
    si->add_option("--mode", si_mode, "How tasks wait out GPU segments")
        ->check(CLI::IsMember({"busy", "suspend"}));
    si->add_option("--horizon-ms", si_horizon_ms, "Simulated time span")
        ->check(CLI::PositiveNumber);
    si->add_option("--pattern", si_pattern, "Job release pattern")
        ->check(CLI::IsMember(
            {"synchronous", "periodic_with_offsets", "sporadic"}));
    si->add_option("--seed", si_seed, "Seed for offsets / sporadic gaps");
    si->add_option("--jitter-lo", si_jitter_lo,
                   "Sporadic slack, lower bound (fraction of period)");
    si->add_option("--jitter-hi", si_jitter_hi,
                   "Sporadic slack, upper bound (fraction of period)");
    si->add_option("--trace", si_trace, "Write an event trace (CSV file)");
    si->add_flag("--check-invariants", si_check,
                 "Check scheduling invariants; violations exit with 3");
    si->add_option("--format", si_format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    si->add_option("--out", si_out, "Output file (default stdout)");

    // ---- assign-prio ----
    std::string ap_input, ap_mode = "suspend", ap_out;
    auto* ap = app.add_subcommand(
        "assign-prio", "Search for a feasible GPU-priority assignment");
    ap->add_option("--input", ap_input, "Taskset (JSON file)")->required();
    ap->add_option("--mode", ap_mode, "How tasks wait out GPU segments")
        ->check(CLI::IsMember({"busy", "suspend"}));
    ap->add_option("--out", ap_out, "Output file (default stdout)");

    // ---- sweep ----
    std::string sw_config, sw_param, sw_out;
    std::vector<double> sw_values;
    std::vector<std::string> sw_methods = method_names();
    int sw_sets = 200;
    std::uint64_t sw_seed = 0;
    bool sw_seed_set = false;
    auto* sw = app.add_subcommand(
        "sweep", "Acceptance ratio of each method across a parameter sweep");
    sw->add_option("--config", sw_config,
                   "Generator parameters (JSON file)");
    sw->add_option("--param", sw_param, "Swept generator parameter")
        ->required()
        ->check(CLI::IsMember({"util_per_core", "gpu_task_ratio",
                               "best_effort_ratio", "epsilon_ms",
                               "theta_ms"}));
    sw->add_option("--values", sw_values, "Sweep points")
        ->required()
        ->delimiter(',');
    sw->add_option("--methods", sw_methods, "Methods to compare")
        ->delimiter(',')
        ->check(CLI::IsMember(method_names()));
    sw->add_option("--sets", sw_sets, "Tasksets per sweep point")
        ->check(CLI::PositiveNumber);
    sw->add_option("--seed", sw_seed, "Base seed")
        ->each([&](const std::string&) { sw_seed_set = true; });
    sw->add_option("--out", sw_out, "Output file (default stdout, CSV)");

    // ---- soundness ----
    std::string so_config, so_out;
    std::vector<std::string> so_methods = {"gcaps_busy", "gcaps_suspend",
                                           "tsg_rr_busy", "tsg_rr_suspend"};
    int so_sets = 100;
    double so_horizon_ms = 2000.0;
    std::uint64_t so_seed = 0x5eed;
    auto* so = app.add_subcommand(
        "soundness",
        "Compare simulated response times against analytic bounds");
    so->add_option("--config", so_config,
                   "Generator parameters (JSON file)");
    so->add_option("--methods", so_methods, "Methods to check")
        ->delimiter(',')
        ->check(CLI::IsMember(method_names()));
    so->add_option("--sets", so_sets, "Number of generated tasksets")
        ->check(CLI::PositiveNumber);
    so->add_option("--horizon-ms", so_horizon_ms, "Simulated time span")
        ->check(CLI::PositiveNumber);
    so->add_option("--seed", so_seed, "Base seed");
    so->add_option("--out", so_out, "Report file (default stdout, JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen->parsed()) {
            GenParams p = load_gen_params(gen_config);
            if (gen_seed_set) p.seed = gen_seed;
            for (int k = 0; k < gen_count; ++k) {
                const Taskset ts =
                    gen_count == 1
                        ? generate_taskset(p)
                        : generate_indexed(p, p.seed,
                                           static_cast<std::uint64_t>(k));
                const std::string text =
                    taskset_to_json(ts).dump(2) + "\n";
                if (gen_count == 1)
                    emit(gen_out, text);
                else
                    write_text_file(gen_out + "_" + std::to_string(k) +
                                        ".json",
                                    text);
            }
            return kExitOk;
        }

        if (an->parsed()) {
            const Taskset ts = load_taskset(an_input);
            const AnalysisResult res =
                analyze_with_method(ts, *parse_method(an_method));
            emit(an_out, an_format == "csv"
                             ? analysis_to_csv(res)
                             : analysis_to_json(res).dump(2) + "\n");
            return kExitOk;
        }

        if (si->parsed()) {
            const Taskset ts = load_taskset(si_input);
            SimConfig sc;
            sc.policy = si_policy == "gcaps" ? GpuPolicy::gcaps
                                             : GpuPolicy::tsg_rr;
            sc.wait_mode =
                si_mode == "busy" ? WaitMode::busy : WaitMode::suspend;
            sc.horizon = ms_to_us(si_horizon_ms);
            sc.pattern = parse_pattern(si_pattern);
            sc.seed = si_seed;
            sc.jitter_lo = si_jitter_lo;
            sc.jitter_hi = si_jitter_hi;
            sc.record_trace = !si_trace.empty();
            sc.check_invariants = si_check;
            const SimResult res = simulate(ts, sc);
            if (!si_trace.empty())
                write_text_file(si_trace, trace_to_csv(res.trace));
            emit(si_out, si_format == "csv"
                             ? sim_result_to_csv(res)
                             : sim_result_to_json(res).dump(2) + "\n");
            if (!res.invariant_violations.empty()) {
                for (const auto& v : res.invariant_violations)
                    std::cerr << "invariant violation: " << v << "\n";
                return kExitViolation;
            }
            return kExitOk;
        }

        if (ap->parsed()) {
            const Taskset ts = load_taskset(ap_input);
            const WaitMode mode =
                ap_mode == "busy" ? WaitMode::busy : WaitMode::suspend;
            const GpuPriorityAssignment found =
                assign_gpu_priorities(ts, mode);
            json j;
            j["feasible"] = found.feasible;
            if (found.feasible) {
                json gp = json::object();
                for (const auto& [id, prio] : found.gpu_priorities)
                    gp[std::to_string(id)] = prio;
                j["gpu_priorities"] = gp;
                j["taskset"] = taskset_to_json(
                    apply_gpu_priorities(ts, found.gpu_priorities));
            }
            emit(ap_out, j.dump(2) + "\n");
            return kExitOk;
        }

        if (sw->parsed()) {
            SweepSpec spec;
            spec.base = load_gen_params(sw_config);
            if (sw_seed_set) spec.base.seed = sw_seed;
            spec.param = sw_param;
            spec.values = sw_values;
            spec.methods = parse_methods(sw_methods);
            spec.sets_per_point = sw_sets;
            emit(sw_out, sweep_to_csv(run_sweep(spec)));
            return kExitOk;
        }

        if (so->parsed()) {
            const GenParams base = load_gen_params(so_config);
            const SoundnessReport report =
                check_soundness(base, so_sets, parse_methods(so_methods),
                                ms_to_us(so_horizon_ms), so_seed);
            json j;
            j["tasksets"] = report.tasksets;
            j["comparisons"] = report.comparisons;
            j["violations"] = json::array();
            for (const auto& v : report.violations)
                j["violations"].push_back(
                    {{"set_index", v.set_index},
                     {"method", to_string(v.method)},
                     {"pattern", v.pattern == ReleasePattern::synchronous
                                     ? "synchronous"
                                     : "sporadic"},
                     {"sim_seed", v.sim_seed},
                     {"task", v.task},
                     {"observed_ms", us_to_ms(v.observed)},
                     {"bound_ms", us_to_ms(v.bound)}});
            emit(so_out, j.dump(2) + "\n");
            if (!report.violations.empty()) {
                std::cerr << report.violations.size()
                          << " soundness violation(s) found\n";
                return kExitViolation;
            }
            return kExitOk;
        }
    } catch (const invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitUsage;
}
