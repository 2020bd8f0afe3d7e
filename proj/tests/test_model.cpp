#include <catch2/catch_amalgamated.hpp>

#include "gsched/gen.hpp"
#include "gsched/model.hpp"

using namespace gsched;

namespace {

Task simple_task(int id, int core, int prio, time_us c, time_us period) {
    Task t;
    t.id = id;
    t.core = core;
    t.cpu_priority = prio;
    t.gpu_priority = prio;
    t.cpu_segments = {c};
    t.period = period;
    t.deadline = period;
    return t;
}

bool mentions(const std::vector<std::string>& msgs, const std::string& what) {
    for (const auto& m : msgs)
        if (m.find(what) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("time conversions", "[model]") {
    CHECK(ms_to_us(1.024) == 1024);
    CHECK(ms_to_us(0.0) == 0);
    CHECK(ms_to_us(500.0) == 500000);
    CHECK(us_to_ms(1024) == Catch::Approx(1.024));
    CHECK(ceil_div(0, 7) == 0);
    CHECK(ceil_div(1, 7) == 1);
    CHECK(ceil_div(7, 7) == 1);
    CHECK(ceil_div(8, 7) == 2);
}

TEST_CASE("task demand helpers", "[model]") {
    Task t;
    t.cpu_segments = {2000, 4000, 3000};
    t.gpu_segments = {{2000, 4000}, {2000, 2000}};
    CHECK(t.total_cpu() == 9000);
    CHECK(t.total_misc() == 4000);
    CHECK(t.total_pure() == 6000);
    CHECK(t.total_gpu() == 10000);
    CHECK(t.total_demand() == 19000);
    CHECK(t.num_gpu_segments() == 2);
    CHECK(t.uses_gpu());

    Task cpu_only = simple_task(1, 0, 1, 5000, 10000);
    CHECK_FALSE(cpu_only.uses_gpu());
    CHECK(cpu_only.total_demand() == 5000);
}

TEST_CASE("priority comparison breaks ties by id", "[model]") {
    Task a = simple_task(1, 0, 5, 100, 1000);
    Task b = simple_task(2, 1, 5, 100, 1000);
    Task c = simple_task(3, 1, 7, 100, 1000);
    CHECK(higher_cpu_priority(c, a));
    CHECK_FALSE(higher_cpu_priority(a, c));
    CHECK(higher_cpu_priority(a, b)); // equal priority, lower id wins
    CHECK_FALSE(higher_cpu_priority(b, a));
}

TEST_CASE("reference taskset is valid", "[model]") {
    const Taskset ts = table2_taskset();
    CHECK(ts.validate().empty());
}

TEST_CASE("validation rejects malformed structures", "[model]") {
    Taskset ts;
    ts.config.num_cores = 2;

    SECTION("duplicate ids") {
        ts.tasks = {simple_task(1, 0, 2, 100, 1000),
                    simple_task(1, 1, 1, 100, 1000)};
        CHECK(mentions(ts.validate(), "duplicate task id"));
    }
    SECTION("deadline beyond period") {
        Task t = simple_task(1, 0, 1, 100, 1000);
        t.deadline = 1500;
        ts.tasks = {t};
        CHECK(mentions(ts.validate(), "deadline"));
    }
    SECTION("core out of range") {
        ts.tasks = {simple_task(1, 5, 1, 100, 1000)};
        CHECK(mentions(ts.validate(), "out of range"));
    }
    SECTION("segment count mismatch") {
        Task t = simple_task(1, 0, 1, 100, 1000);
        t.gpu_segments = {{10, 20}}; // needs two cpu segments then
        ts.tasks = {t};
        CHECK(mentions(ts.validate(), "cpu segment"));
    }
    SECTION("negative cpu segment") {
        Task t = simple_task(1, 0, 1, 100, 1000);
        t.cpu_segments = {-1};
        ts.tasks = {t};
        CHECK(mentions(ts.validate(), ">= 0"));
    }
    SECTION("zero-length pure gpu part") {
        Task t = simple_task(1, 0, 1, 100, 1000);
        t.cpu_segments = {50, 50};
        t.gpu_segments = {{10, 0}};
        ts.tasks = {t};
        CHECK(mentions(ts.validate(), "pure_gpu"));
    }
    SECTION("shared cpu priority on a core") {
        ts.tasks = {simple_task(1, 0, 3, 100, 1000),
                    simple_task(2, 0, 3, 100, 1000)};
        CHECK(mentions(ts.validate(), "share cpu_priority"));
    }
    SECTION("gpu priority order must match cpu order per core") {
        Task a = simple_task(1, 0, 2, 100, 1000);
        Task b = simple_task(2, 0, 1, 100, 1000);
        a.gpu_priority = 1;
        b.gpu_priority = 2;
        ts.tasks = {a, b};
        CHECK(mentions(ts.validate(),
                       "gpu priority order different from cpu"));
    }
    SECTION("gpu priority order across cores is unconstrained") {
        Task a = simple_task(1, 0, 2, 100, 1000);
        Task b = simple_task(2, 1, 1, 100, 1000);
        a.gpu_priority = 1;
        b.gpu_priority = 2;
        ts.tasks = {a, b};
        CHECK(ts.validate().empty());
    }
    SECTION("best-effort tasks may share priority values") {
        Task a = simple_task(1, 0, 0, 100, 1000);
        Task b = simple_task(2, 0, 0, 100, 1000);
        a.realtime = false;
        b.realtime = false;
        ts.tasks = {a, b};
        CHECK(ts.validate().empty());
    }
    SECTION("config sanity") {
        ts.tasks = {simple_task(1, 0, 1, 100, 1000)};
        ts.config.slice = 0;
        CHECK(mentions(ts.validate(), "slice"));
    }
}

TEST_CASE("per-core CPU utilization covers launch parts and best-effort",
          "[model]") {
    const Taskset ts = table2_taskset();
    const auto util = ts.per_core_utilization();
    REQUIRE(util.size() == 2);
    // core 0: (9 + 4)/80 + 40/150 + (18 + 2)/200, all in ms
    CHECK(util.at(0) == Catch::Approx(13.0 / 80 + 40.0 / 150 + 20.0 / 200));
    // core 1: (34 + 5)/190
    CHECK(util.at(1) == Catch::Approx(39.0 / 190));
}

TEST_CASE("utilization includes best-effort tasks", "[model]") {
    Taskset ts;
    ts.config.num_cores = 1;
    Task rt = simple_task(1, 0, 1, 200, 1000);
    Task be = simple_task(2, 0, 0, 300, 1000);
    be.realtime = false;
    ts.tasks = {rt, be};
    CHECK(ts.per_core_utilization().at(0) == Catch::Approx(0.5));
}
