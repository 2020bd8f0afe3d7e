#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "gsched/gen.hpp"
#include "gsched/serialize.hpp"
#include "oracles.hpp"

using namespace gsched;

TEST_CASE("seed splitting decorrelates streams", "[rng]") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 50; ++s)
        for (std::uint64_t i = 0; i < 50; ++i)
            seen.insert(split_seed(s, i));
    CHECK(seen.size() == 2500);
}

TEST_CASE("rng primitives stay in range", "[rng]") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.real01();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        const auto k = rng.integer(3, 9);
        CHECK(k >= 3);
        CHECK(k <= 9);
    }
    const double r = rng.real(2.5, 2.5);
    CHECK(r == Catch::Approx(2.5));
}

TEST_CASE("uunifast splits sum to the target and stay non-negative",
          "[gen]") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.integer(1, 8));
        const auto u = uunifast(n, 0.75, rng);
        REQUIRE(static_cast<int>(u.size()) == n);
        double sum = 0.0;
        for (double x : u) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(sum == Catch::Approx(0.75));
    }
}

TEST_CASE("uunifast with two tasks gives a uniform first share", "[gen]") {
    Rng rng(13);
    std::vector<double> samples;
    for (int i = 0; i < 10000; ++i)
        samples.push_back(uunifast(2, 1.0, rng)[0]);
    // Kolmogorov-Smirnov against Uniform(0,1); 0.02 is well above the
    // 1% critical value 1.63/sqrt(10000) ~ 0.0163.
    CHECK(oracle::ks_uniform(samples) < 0.02);
}

TEST_CASE("segment splits sum exactly", "[gen]") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const time_us total = static_cast<time_us>(rng.integer(1, 100000));
        const int parts = static_cast<int>(rng.integer(1, 5));
        const auto xs = detail::split_uniform(total, parts, rng);
        REQUIRE(static_cast<int>(xs.size()) == parts);
        time_us sum = 0;
        for (time_us x : xs) sum += x;
        CHECK(sum == total);
    }
}

TEST_CASE("generation is deterministic in the seed", "[gen]") {
    GenParams p;
    p.seed = 123;
    const std::string a = taskset_to_json(generate_taskset(p)).dump();
    const std::string b = taskset_to_json(generate_taskset(p)).dump();
    p.seed = 124;
    const std::string c = taskset_to_json(generate_taskset(p)).dump();
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("generated tasksets respect the advertised parameters", "[gen]") {
    GenParams p;
    p.seed = 42;
    const Taskset ts = generate_taskset(p);
    REQUIRE(ts.validate().empty());

    const int n = static_cast<int>(ts.tasks.size());
    CHECK(n >= 3 * p.num_cores);
    CHECK(n <= 6 * p.num_cores);

    int gpu_users = 0;
    for (const Task& t : ts.tasks) {
        CHECK(t.deadline == t.period);
        CHECK(t.period >= ms_to_us(p.period_ms.lo));
        CHECK(t.period <= ms_to_us(p.period_ms.hi));
        CHECK(t.realtime); // no best-effort share by default
        const double u = static_cast<double>(t.total_demand()) /
                         static_cast<double>(t.period);
        CHECK(u <= 1.0);
        if (t.uses_gpu()) {
            gpu_users++;
            CHECK(t.num_gpu_segments() >= p.gpu_segments_per_task.lo);
            CHECK(t.num_gpu_segments() <= p.gpu_segments_per_task.hi);
            const double g = static_cast<double>(t.total_gpu());
            const double c = static_cast<double>(t.total_cpu());
            if (c > 0) {
                const double gc = g / c;
                CHECK(gc >= p.g_to_c_ratio.lo * 0.9);
                CHECK(gc <= p.g_to_c_ratio.hi * 1.1);
            }
            const double gm_share = static_cast<double>(t.total_misc()) / g;
            CHECK(gm_share >= p.gm_in_g_ratio.lo * 0.5);
            CHECK(gm_share <= p.gm_in_g_ratio.hi * 1.5);
        }
    }
    // round(ratio * n) GPU users with ratio drawn from [0.4, 0.6]
    CHECK(gpu_users >= static_cast<int>(0.3 * n));
    CHECK(gpu_users <= static_cast<int>(0.7 * n) + 1);

    // configuration carried over
    CHECK(ts.config.num_cores == 4);
    CHECK(ts.config.slice == 1024);
    CHECK(ts.config.ctx_switch == 200);
    CHECK(ts.config.runlist_update == 1000);
}

TEST_CASE("priorities are rate monotonic with gpu equal to cpu", "[gen]") {
    GenParams p;
    p.seed = 7;
    const Taskset ts = generate_taskset(p);
    for (const Task& a : ts.tasks) {
        CHECK(a.gpu_priority == a.cpu_priority);
        for (const Task& b : ts.tasks) {
            if (a.id == b.id) continue;
            if (a.period < b.period) CHECK(a.cpu_priority > b.cpu_priority);
            if (a.period == b.period && a.id < b.id)
                CHECK(a.cpu_priority > b.cpu_priority);
        }
    }
}

TEST_CASE("worst-fit keeps cores balanced", "[gen]") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        GenParams p;
        p.seed = seed;
        const Taskset ts = generate_taskset(p);
        const auto util = ts.per_core_utilization();
        double max_u = 0.0;
        int used = 0;
        for (const auto& [core, u] : util) {
            max_u = std::max(max_u, u);
            if (u > 0) used++;
        }
        CHECK(used == p.num_cores);
        CHECK(max_u <= 1.0);
    }
}

TEST_CASE("best-effort share is applied", "[gen]") {
    GenParams p;
    p.seed = 21;
    p.best_effort_ratio = 0.4;
    const Taskset ts = generate_taskset(p);
    int be = 0;
    for (const Task& t : ts.tasks)
        if (!t.realtime) be++;
    const int n = static_cast<int>(ts.tasks.size());
    CHECK(be == static_cast<int>(std::llround(0.4 * n)));
    CHECK(ts.validate().empty());
}

TEST_CASE("log-uniform periods stay inside the range", "[gen]") {
    GenParams p;
    p.seed = 3;
    p.period_dist = PeriodDist::log_uniform;
    const Taskset ts = generate_taskset(p);
    for (const Task& t : ts.tasks) {
        CHECK(t.period >= ms_to_us(p.period_ms.lo));
        CHECK(t.period <= ms_to_us(p.period_ms.hi));
    }
}

TEST_CASE("impossible utilization targets are rejected", "[gen]") {
    GenParams p;
    p.util_per_core = {3.0, 3.0};
    p.tasks_per_core = {3, 3};
    CHECK_THROWS_AS(generate_taskset(p), generation_error);
}

TEST_CASE("reference taskset matches its published shape", "[gen]") {
    const Taskset ts = table2_taskset();
    REQUIRE(ts.tasks.size() == 4);
    const Task& t1 = ts.tasks[0];
    CHECK(t1.core == 0);
    CHECK(t1.period == 80000);
    CHECK(t1.cpu_segments == std::vector<time_us>{2000, 4000, 3000});
    CHECK(t1.num_gpu_segments() == 2);
    CHECK(t1.cpu_priority == 4);
    const Task& t3 = ts.tasks[2];
    CHECK(t3.core == 1);
    CHECK(t3.first_release == 70000);
    CHECK(t3.total_pure() == 80000);
    const Task& t4 = ts.tasks[3];
    CHECK(t4.cpu_priority == 1);
    CHECK(t4.total_demand() == 30000);
    CHECK(ts.config.slice == 1024);
    CHECK(ts.config.ctx_switch == 200);
    CHECK(ts.config.runlist_update == 1000);
}
