#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "gsched/rta_rr.hpp"

using namespace gsched;
using fixtures::mk_best_effort;
using fixtures::mk_config;
using fixtures::mk_task;

TEST_CASE("interleave delay closed form", "[rta_rr]") {
    SystemConfig cfg = mk_config(1, 1000, 200, 1000);
    // 2 competitors, 2500us burst -> 3 slices, each preceded by 2 * (L + theta)
    CHECK(interleave_delay(2, 2500, cfg) == 7200);
    CHECK(interleave_delay(3, 0, cfg) == 0);    // empty burst needs no slice
    CHECK(interleave_delay(0, 5000, cfg) == 0); // no competitors, no delay

    SystemConfig cfg2 = mk_config(1, 1024, 200, 1000);
    CHECK(interleave_delay(1, 1000, cfg2) == 1224); // sub-slice burst: 1 slice
}

TEST_CASE("own-segment interleaving counts every other gpu user", "[rta_rr]") {
    Taskset ts;
    ts.config = mk_config(2, 1000, 200, 1000);
    ts.tasks = {
        mk_task(1, 0, 4, {100, 100, 100}, {{0, 1000}, {0, 2000}}, 100000),
        mk_task(2, 0, 3, {100, 100}, {{0, 500}}, 100000),
        mk_task(3, 1, 2, {100, 100}, {{0, 500}}, 100000),
        mk_best_effort(4, 1, {0, 0}, {{0, 500}}, 100000),
        mk_task(5, 1, 1, {100}, {}, 100000), // cpu-only: not a competitor
    };
    REQUIRE(ts.validate().empty());
    // nu = 3 for task 1: tasks 2, 3 and the best-effort task 4.
    CHECK(rr_interleaved(ts, 1) == 3600 + 7200);
    CHECK(rr_interleaved(ts, 5) == 0); // no gpu segments of its own
}

namespace {

// Single fixture exercising the busy-wait stretching term: task 3 is cpu-only
// behind one gpu-using and one cpu-only higher-priority task; a remote
// real-time task and a remote best-effort task also hold gpu runlist entries.
Taskset indirect_fixture() {
    Taskset ts;
    ts.config = mk_config(2, 1000, 200, 1000);
    ts.tasks = {
        mk_task(1, 0, 3, {500, 500}, {{100, 1000}}, 10000),
        mk_task(2, 0, 2, {2000}, {}, 20000),
        mk_task(3, 0, 1, {1000}, {}, 50000),
        mk_task(4, 1, 1, {100, 100}, {{50, 3000}}, 40000),
        mk_best_effort(5, 1, {0, 0}, {{0, 2000}}, 40000),
    };
    return ts;
}

} // namespace

TEST_CASE("busy-wait stretching of higher-priority gpu waits", "[rta_rr]") {
    const Taskset ts = indirect_fixture();
    REQUIRE(ts.validate().empty());
    // Competitors for task 1's wait as seen from task 3: tasks 4 and 5 are
    // outside hpp(3), plus task 1 itself -> nu = 3, I(3, 1000us) = 3600us.
    CHECK(rr_indirect_busy(ts, 3, 10000) == 3600);  // one release of task 1
    CHECK(rr_indirect_busy(ts, 3, 15000) == 7200);  // window covers two
    CHECK(rr_indirect_busy(ts, 1, 100000) == 0);    // nothing above task 1
    CHECK(rr_indirect_busy(ts, 2, 10000) == 3600);  // task 1 also above task 2
}

TEST_CASE("cpu preemption with and without suspension jitter", "[rta_rr]") {
    Taskset ts;
    ts.config = mk_config(1, 1000, 200, 1000);
    ts.tasks = {
        mk_task(1, 0, 2, {3000, 1000}, {{1000, 2000}}, 10000),
        mk_task(2, 0, 1, {1000}, {}, 50000),
    };
    REQUIRE(ts.validate().empty());
    // Higher-priority demand per release: C + G^m = 4000 + 1000 = 5000us.
    ResponseMap responses;
    responses[1] = 8000; // jitter J = 8000 - 5000 = 3000us

    CHECK(rr_cpu_preempt(ts, 2, 25000, WaitMode::busy, {}) == 15000);
    CHECK(rr_cpu_preempt(ts, 2, 25000, WaitMode::suspend, responses) == 15000);
    // Window where only the jittered count sees a third release.
    CHECK(rr_cpu_preempt(ts, 2, 17500, WaitMode::busy, {}) == 10000);
    CHECK(rr_cpu_preempt(ts, 2, 17500, WaitMode::suspend, responses) == 15000);

    SECTION("suspend mode needs the higher-priority response first") {
        CHECK_THROWS_AS(rr_cpu_preempt(ts, 2, 17500, WaitMode::suspend, {}),
                        analysis_order_error);
    }
    SECTION("cpu-only contributors never suspend, so they carry no jitter") {
        Taskset plain = ts;
        plain.tasks[0].gpu_segments.clear();
        plain.tasks[0].cpu_segments = {5000};
        CHECK(rr_cpu_preempt(plain, 2, 17500, WaitMode::suspend, {}) ==
              10000);
    }
    SECTION("an unbounded dependency poisons the term") {
        ResponseMap unbounded;
        unbounded[1] = std::nullopt;
        CHECK_FALSE(
            rr_cpu_preempt(ts, 2, 17500, WaitMode::suspend, unbounded));
    }
}

TEST_CASE("lone gpu task suffers no round-robin overhead", "[rta_rr]") {
    Taskset ts;
    ts.config = mk_config(1, 1000, 200, 1000);
    ts.tasks = {mk_task(1, 0, 1, {2000, 0}, {{1000, 4000}}, 100000)};
    for (WaitMode mode : {WaitMode::busy, WaitMode::suspend}) {
        const auto res = rr_response_times(ts, mode);
        REQUIRE(res.per_task.at(1).wcrt.has_value());
        CHECK(*res.per_task.at(1).wcrt == 7000); // C + G exactly
        CHECK(res.taskset_schedulable);
    }
}

TEST_CASE("two remote gpu tasks interleave each other", "[rta_rr]") {
    Taskset ts;
    ts.config = mk_config(2, 1000, 200, 1000);
    ts.tasks = {
        mk_task(1, 0, 1, {500, 500}, {{0, 2000}}, 100000),
        mk_task(2, 1, 1, {500, 500}, {{0, 2000}}, 100000),
    };
    REQUIRE(ts.validate().empty());
    for (WaitMode mode : {WaitMode::busy, WaitMode::suspend}) {
        const auto res = rr_response_times(ts, mode);
        for (int id : {1, 2}) {
            const auto& ta = res.per_task.at(id);
            REQUIRE(ta.wcrt.has_value());
            CHECK(*ta.wcrt == 5400); // 3000 demand + 2 slices * (L + theta)
            CHECK(ta.breakdown.gpu_interleave == 2400);
            CHECK(ta.breakdown.cpu_preempt == 0);
            CHECK(ta.breakdown.gpu_indirect == 0);
        }
        CHECK(res.taskset_schedulable);
    }
}

TEST_CASE("bounds compose from their reported breakdown", "[rta_rr]") {
    const Taskset ts = indirect_fixture();
    const auto res = rr_response_times(ts, WaitMode::busy);
    for (const auto& [id, ta] : res.per_task) {
        if (!ta.wcrt) continue;
        const Task* t = ts.find(id);
        CHECK(*ta.wcrt == t->total_demand() + ta.breakdown.cpu_preempt +
                              ta.breakdown.gpu_indirect +
                              ta.breakdown.gpu_interleave);
        CHECK(ta.breakdown.cpu_block == 0);  // no blocking in this policy
        CHECK(ta.breakdown.gpu_direct == 0); // no gpu preemption either
    }
}

TEST_CASE("unbounded higher-priority task poisons suspend mode only",
          "[rta_rr]") {
    Taskset ts;
    ts.config = mk_config(1, 1000, 200, 1000);
    // Task 1 (GPU-using, so its suspend jitter matters) can never meet its
    // short deadline, but its long period keeps the lower-priority task's
    // fixed point convergent in busy mode.
    ts.tasks = {
        mk_task(1, 0, 2, {10000, 0}, {{0, 1000}}, 40000, 10000),
        mk_task(2, 0, 1, {1000}, {}, 100000),
    };
    REQUIRE(ts.validate().empty());

    const auto busy = rr_response_times(ts, WaitMode::busy);
    CHECK_FALSE(busy.per_task.at(1).wcrt.has_value());
    REQUIRE(busy.per_task.at(2).wcrt.has_value());
    // 1000 own + 10000 preemption + 1200 stretched busy-wait (one slice).
    CHECK(*busy.per_task.at(2).wcrt == 12200);
    CHECK_FALSE(busy.taskset_schedulable);

    const auto susp = rr_response_times(ts, WaitMode::suspend);
    CHECK_FALSE(susp.per_task.at(1).wcrt.has_value());
    CHECK_FALSE(susp.per_task.at(2).wcrt.has_value()); // depends on task 1
    CHECK_FALSE(susp.per_task.at(2).schedulable);
}

TEST_CASE("deadline overrun is reported as unschedulable", "[rta_rr]") {
    Taskset ts;
    ts.config = mk_config(1, 1000, 200, 1000);
    ts.tasks = {
        mk_task(1, 0, 2, {6000}, {}, 10000),
        mk_task(2, 0, 1, {6000}, {}, 11000),
    };
    const auto res = rr_response_times(ts, WaitMode::busy);
    CHECK(res.per_task.at(1).schedulable);
    CHECK_FALSE(res.per_task.at(2).schedulable);
    CHECK_FALSE(res.per_task.at(2).wcrt.has_value());
    CHECK_FALSE(res.taskset_schedulable);
}
