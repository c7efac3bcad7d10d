#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "stockcascade/critical.hpp"
#include "stockcascade/sweep.hpp"

using namespace stockcascade;
using stockcascade::testing::random_network;
using stockcascade::testing::toy_t1;
using stockcascade::testing::toy_t2;

TEST_CASE("exact alpha_ci on toy T1 marks S2 unavoidable") {
    auto net = toy_t1();
    auto a = neighbor_alpha_c(net, net.stock_index("S1"), net.stock_index("S2"), 0.1);
    CHECK(a.value == Catch::Approx(1.6));
    CHECK(a.flag == AlphaCiFlag::unavoidable);
}

TEST_CASE("exact alpha_ci on toy T2 is 0.8 at c = 0.6") {
    auto net = toy_t2();
    auto a = neighbor_alpha_c(net, net.stock_index("S1"), net.stock_index("S2"), 0.6);
    CHECK(a.value == Catch::Approx(0.8));
    CHECK(a.flag == AlphaCiFlag::ok);
}

TEST_CASE("simplified alpha_ci on toy T1 is 0.8 at c = 0.1") {
    auto net = toy_t1();
    auto a = neighbor_alpha_c_simplified(net, net.stock_index("S1"), net.stock_index("S2"), 0.1);
    CHECK(a.value == Catch::Approx(0.8));
}

TEST_CASE("full nestedness gives simplified alpha_ci of exactly 1 - c") {
    // target's only investor also holds the shock
    auto net = testing::from_records(
        {{"C", "S1", 3.7}, {"C", "S2", 0.913}, {"D", "S1", 1.1}});
    for (double c : {0.1, 0.37, 0.6}) {
        auto a = neighbor_alpha_c_simplified(net, net.stock_index("S1"), net.stock_index("S2"), c);
        CHECK(a.value == 1.0 - c);  // bitwise
    }
}

TEST_CASE("exact alpha_ci approaches 1 - c as the shock weight vanishes") {
    auto net = testing::from_records({{"C", "S1", 1e-9}, {"C", "S2", 1.0}});
    auto a = neighbor_alpha_c(net, net.stock_index("S1"), net.stock_index("S2"), 0.4);
    CHECK(a.value == Catch::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("no common investor is a domain error") {
    auto net = testing::from_records({{"C1", "S1", 1.0}, {"C2", "S2", 1.0}});
    CHECK_THROWS(neighbor_alpha_c(net, 0, 1, 0.5));
    CHECK_THROWS(neighbor_alpha_c_simplified(net, 0, 1, 0.5));
    CHECK_THROWS(neighbor_alpha_c(net, 0, 0, 0.5));
}

TEST_CASE("negative numerator clamps to zero with the cannot-fail flag") {
    // target value dominated by an investor outside L
    auto net = testing::from_records(
        {{"C", "S1", 1.0}, {"C", "S2", 0.1}, {"D", "S2", 100.0}});
    auto a = neighbor_alpha_c(net, net.stock_index("S1"), net.stock_index("S2"), 0.5);
    CHECK(a.value == 0.0);
    CHECK(a.flag == AlphaCiFlag::cannot_fail);
}

TEST_CASE("exact alpha_ci is never below the simplified value") {
    std::mt19937_64 rng(17);
    int checked = 0;
    while (checked < 200) {
        auto net = random_network(rng, 8, 3, 14);
        int shock = static_cast<int>(rng() % net.num_stocks());
        int target = static_cast<int>(rng() % net.num_stocks());
        if (shock == target) continue;
        AlphaCi exact, simplified;
        try {
            exact = neighbor_alpha_c(net, shock, target, 0.3);
            simplified = neighbor_alpha_c_simplified(net, shock, target, 0.3);
        } catch (const std::invalid_argument&) {
            continue;
        }
        if (exact.flag == AlphaCiFlag::indeterminate || simplified.flag == AlphaCiFlag::indeterminate)
            continue;
        CHECK(exact.value >= simplified.value - 1e-12);
        ++checked;
    }
}

TEST_CASE("bisection finds the toy T2 flip at 0.8") {
    auto net = toy_t2();
    auto a = find_alpha_c(net, net.stock_index("S1"), 0.6, 1.0, 1e-3);
    REQUIRE(a.is_value());
    CHECK(std::fabs(a.alpha_c - 0.8) <= 1e-3);
}

TEST_CASE("bisection sentinels") {
    auto net = toy_t1();
    // c = 0.1 collapses for every alpha
    CHECK(find_alpha_c(net, net.stock_index("S1"), 0.1).kind == AlphaC::always_collapses);
    // deep limit: a single investor's total loss cannot push others under
    auto star = testing::from_records(
        {{"C", "S1", 1.0}, {"C", "S2", 50.0}, {"D", "S2", 50.0}, {"D", "S3", 50.0}});
    CHECK(find_alpha_c(star, star.stock_index("S1"), 0.99).kind == AlphaC::never_collapses);
}

TEST_CASE("collapse indicator is monotone in alpha on sampled grids") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        auto net = random_network(rng, 10, 3, 15);
        int shock = static_cast<int>(rng() % net.num_stocks());
        double c = 0.1 + 0.7 * (rng() % 100) / 100.0;
        bool prev = true;
        for (double alpha = 0.0; alpha <= 1.0; alpha += 0.1) {
            bool collapsed = run_cascade(net, shock, alpha, c).final_failed_fraction >= 0.5;
            CHECK((prev || !collapsed));  // once stable, stays stable
            prev = collapsed;
        }
    }
}

TEST_CASE("P_D of a stock under a universal investor is (N-1)/N") {
    // one investor holds everything; every stock is fully nested on any shock
    std::vector<HoldingRecord> records;
    const int n = 6;
    for (int s = 0; s < n; ++s) records.push_back({"C", "S" + std::to_string(s), 1.0 + s});
    auto net = testing::from_records(records);
    auto p_d = driving_node_probability(net, 0.3);
    for (double v : p_d) CHECK(v == Catch::Approx((n - 1.0) / n));
}

TEST_CASE("a private investor forces P_D to zero") {
    auto net = testing::from_records({{"C", "S1", 1.0},
                                      {"C", "S2", 1.0},
                                      {"P", "S2", 1.0}});  // P holds only S2
    auto p_d = driving_node_probability(net, 0.3);
    CHECK(p_d[net.stock_index("S2")] == 0.0);
    // S1 is fully nested on S2, so shocking S2 makes it a driving node
    CHECK(p_d[net.stock_index("S1")] == Catch::Approx(0.5));
}

TEST_CASE("P_D equals exhaustive structural enumeration on random networks") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        auto net = random_network(rng, 10, 3, 18);
        auto p_d = driving_node_probability(net, 0.25);
        const int n = static_cast<int>(net.num_stocks());
        for (int i = 0; i < n; ++i) {
            // count shocks j such that i shares an investor with j and
            // investors(i) is a subset of holders(j)
            std::set<int> inv_i;
            for (int e : net.stock_edges(i)) inv_i.insert(net.edges()[e].investor);
            int count = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                std::set<int> inv_j;
                for (int e : net.stock_edges(j)) inv_j.insert(net.edges()[e].investor);
                bool shares = false, subset = true;
                for (int m : inv_i) {
                    if (inv_j.count(m))
                        shares = true;
                    else
                        subset = false;
                }
                if (shares && subset) ++count;
            }
            CHECK(p_d[i] == Catch::Approx(static_cast<double>(count) / n));
        }
    }
}

TEST_CASE("max alpha_ci on a star network sits exactly at 1 - c") {
    std::vector<HoldingRecord> records;
    for (int s = 0; s < 8; ++s) records.push_back({"C", "S" + std::to_string(s), 0.5 + s});
    auto net = testing::from_records(records);
    auto hist = max_alpha_ci_histogram(net, 0.3);
    CHECK(hist.fraction_at_boundary == 1.0);
    for (double v : hist.max_per_shock) CHECK(v == 0.7);
}

TEST_CASE("toy T1 max alpha_ci per shock at c = 0.1") {
    auto net = toy_t1();
    auto hist = max_alpha_ci_histogram(net, 0.1);
    CHECK(hist.max_per_shock[net.stock_index("S1")] == Catch::Approx(0.8));
    CHECK(hist.max_per_shock[net.stock_index("S3")] == Catch::Approx(0.8));
    CHECK(hist.max_per_shock[net.stock_index("S2")] == 0.9);  // both neighbors fully nested
}

TEST_CASE("average cascade steps on toy T1") {
    auto net = toy_t1();
    auto p_d = driving_node_probability(net, 0.1);
    auto steps = average_cascade_steps(net, 0.1, 1.0, p_d);
    CHECK(steps.tau_bar[net.stock_index("S2")] == Catch::Approx(1.0));
    CHECK(steps.tau_bar[net.stock_index("S3")] == Catch::Approx(1.5));
    CHECK(steps.never_failed == 0);
}

TEST_CASE("stocks that fail at step one for every shock have tau_bar one") {
    std::vector<HoldingRecord> records;
    for (int s = 0; s < 5; ++s) records.push_back({"C", "S" + std::to_string(s), 1.0});
    auto net = testing::from_records(records);
    auto steps = average_cascade_steps(net, 0.5, 0.0, driving_node_probability(net, 0.5));
    for (double v : steps.tau_bar) CHECK(v == 1.0);
}

TEST_CASE("sweep aggregate is consistent with per-shock bisection") {
    auto net = toy_t2();
    auto sweep = run_sweep(net, {0.6}, {0.5, 0.9}, 1.0, 1e-3);
    REQUIRE(sweep.aggregate.size() == 1);
    // both shocks flip at 0.8 by symmetry
    CHECK(std::fabs(sweep.aggregate[0].mean_alpha_c - 0.8) <= 1e-3);
    // the grid marks alpha = 0.5 collapsed and alpha = 0.9 stable
    for (const auto& cell : sweep.grid) {
        if (cell.alpha == 0.5) CHECK(cell.collapsed);
        if (cell.alpha == 0.9) CHECK_FALSE(cell.collapsed);
    }
}
