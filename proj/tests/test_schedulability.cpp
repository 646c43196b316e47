#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "fogsim/rng.hpp"
#include "fogsim/schedulability.hpp"

using namespace fogsim;

namespace {

// Independent job-enumeration demand for synchronous periodic release:
// sum of C over jobs whose absolute deadline k*T + D falls within [0, delta].
double brute_force_demand(const StreamDemand& d, double delta) {
    double total = 0.0;
    for (uint64_t k = 0;; ++k) {
        const double abs_deadline = static_cast<double>(k) * d.period + d.deadline;
        if (abs_deadline > delta) break;
        total += d.exec_time;
    }
    return total;
}

}  // namespace

TEST_SUITE_BEGIN("schedulability");

TEST_CASE("scale_bounds products") {
    const auto id = scale_bounds(5.0, 3.0, 1.0, 1.0);
    CHECK(id.c_gen_fog == 5.0);
    CHECK(id.c_val_fog == 3.0);

    const auto scaled = scale_bounds(10.0, 4.0, 0.5, 0.25);
    CHECK(scaled.c_gen_fog == 5.0);
    CHECK(scaled.c_val_fog == 1.0);

    CHECK_THROWS_AS(scale_bounds(10.0, 4.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(scale_bounds(0.0, 4.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(scale_bounds(10.0, 4.0, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("dbf guarded-zero and direct evaluations") {
    CHECK(dbf({2, 10, 12}, 1.0) == 0.0);    // ceil(-0.1) guarded to 0
    CHECK(dbf({2, 10, 10}, 10.0) == 2.0);   // ceil(1.0) * 2
    CHECK(dbf({1, 5, 8}, 20.0) == 4.0);     // ceil(17/5) = 4
    CHECK(dbf({2, 10, 10}, 0.0) == 0.0);
    CHECK(dbf({3, 4, 2}, 0.0) == 3.0);      // D < T: ceiling form yields C at 0
    CHECK_THROWS_AS(dbf({2, 10, 10}, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(dbf({0, 10, 10}, 1.0), std::invalid_argument);
}

TEST_CASE("load compositions") {
    const StreamDemand a{2, 10, 10};
    const StreamDemand b{1, 5, 5};
    const std::vector<StreamDemand> one = {a};
    const std::vector<StreamDemand> two = {a, b};
    const std::vector<StreamDemand> none;
    CHECK(load(one, 20.0) == 0.2);
    CHECK(load(two, 10.0) == 0.4);
    CHECK(load(none, 10.0) == 0.0);
    CHECK_THROWS_AS(load(one, 0.0), std::invalid_argument);
}

TEST_CASE("max_load over deadline candidates") {
    const std::vector<StreamDemand> light = {{2, 10, 10}};
    auto [l1, d1] = max_load(light, 40.0);
    CHECK(l1 == 0.2);
    CHECK(d1 == 10.0);  // tie across {10,20,30,40} resolved to the smallest

    const std::vector<StreamDemand> heavy = {{6, 10, 10}};
    auto [l2, d2] = max_load(heavy, 40.0);
    CHECK(l2 == 0.6);
    CHECK(d2 == 10.0);

    const std::vector<StreamDemand> none;
    auto [l3, d3] = max_load(none, 40.0);
    CHECK(l3 == 0.0);
    CHECK(d3 == 40.0);
}

TEST_CASE("admission verdicts") {
    const std::vector<StreamDemand> empty;
    CHECK(admit(empty, {2, 10, 10}, 40.0));

    const std::vector<StreamDemand> busy = {{9, 10, 10}};
    CHECK_FALSE(admit(busy, {2, 10, 10}, 40.0));  // 1.1 at delta = 10

    // Full utilization boundary: load exactly 1.0 still admits.
    CHECK(admit(empty, {2, 2, 2}, 20.0));
}

TEST_CASE("admit is monotone under stream removal") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<StreamDemand> demands;
        const int n = 1 + static_cast<int>(rng.uniform_int(4));
        for (int i = 0; i < n; ++i) {
            demands.push_back({static_cast<double>(1 + rng.uniform_int(4)),
                               static_cast<double>(2 + rng.uniform_int(16)),
                               static_cast<double>(1 + rng.uniform_int(20))});
        }
        const StreamDemand cand{static_cast<double>(1 + rng.uniform_int(3)),
                                static_cast<double>(2 + rng.uniform_int(10)),
                                static_cast<double>(1 + rng.uniform_int(12))};
        if (!admit(demands, cand, 100.0)) continue;
        // Any subset must admit as well.
        for (size_t drop = 0; drop < demands.size(); ++drop) {
            auto fewer = demands;
            fewer.erase(fewer.begin() + static_cast<long>(drop));
            CHECK(admit(fewer, cand, 100.0));
        }
    }
}

TEST_CASE("dbf dominates the job-enumeration oracle and is monotone") {
    Rng rng(3);
    for (int s = 0; s < 10; ++s) {
        const StreamDemand d{static_cast<double>(1 + rng.uniform_int(5)),
                             static_cast<double>(2 + rng.uniform_int(19)),
                             static_cast<double>(1 + rng.uniform_int(25))};
        double prev = 0.0;
        for (int g = 0; g <= 1000; ++g) {
            const double delta = static_cast<double>(g) * 0.0625;  // exact dyadic grid
            const double v = dbf(d, delta);
            CHECK(v >= brute_force_demand(d, delta));  // zero tolerance
            CHECK(v >= prev);                          // non-decreasing in delta
            prev = v;
        }
    }
}

TEST_CASE("dbf scales linearly in execution time") {
    for (double delta : {0.0, 1.0, 7.5, 16.0, 40.0}) {
        CHECK(dbf({3, 4, 6}, delta) == 3.0 * dbf({1, 4, 6}, delta));
    }
}

TEST_CASE("load times delta reproduces the dbf sum") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<StreamDemand> demands;
        const int n = 1 + static_cast<int>(rng.uniform_int(6));
        for (int i = 0; i < n; ++i) {
            demands.push_back({rng.uniform(0.5, 5.0), rng.uniform(1.0, 20.0), rng.uniform(0.5, 25.0)});
        }
        const double delta = rng.uniform(0.5, 50.0);
        double sum = 0.0;
        for (const auto& d : demands) sum += dbf(d, delta);
        const double reconstructed = load(demands, delta) * delta;
        CHECK(std::abs(reconstructed - sum) <=
              1e-15 * static_cast<double>(n) * std::max(1.0, sum));
    }
}

TEST_CASE("default analysis window") {
    const std::vector<StreamDemand> one = {{1, 10, 10}};
    CHECK(default_delta_max(one) == 20.0);  // twice the hyperperiod

    const std::vector<StreamDemand> two = {{1, 10, 10}, {1, 4, 4}};
    CHECK(default_delta_max(two) == 40.0);  // lcm(10, 4) = 20

    const std::vector<StreamDemand> irrational = {{1, 3.14159265358979, 3}};
    CHECK(default_delta_max(irrational) == 1e4);

    const std::vector<StreamDemand> huge = {{1, 9999, 1}, {1, 9998, 1}};
    CHECK(default_delta_max(huge) == 1e4);  // lcm blows past the cap
}

TEST_SUITE_END();
