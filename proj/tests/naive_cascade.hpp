#ifndef STOCKCASCADE_TESTS_NAIVE_CASCADE_HPP
#define STOCKCASCADE_TESTS_NAIVE_CASCADE_HPP

// Reference cascade used as the independent oracle in tests. Everything is
// recomputed from scratch each step from plain sorted maps; no state is
// shared with the engine beyond the input network. Summations run in
// ascending index order, matching the engine's canonical edge order, so
// agreement is exact rather than within a tolerance.

#include <map>
#include <set>
#include <vector>

#include "stockcascade/network.hpp"

namespace stockcascade::testing {

struct NaiveResult {
    std::vector<std::vector<int>> timeline;
    std::set<int> failed;
};

inline NaiveResult naive_cascade(const BipartiteNetwork& net, int shocked_stock, double alpha,
                                 double c, int max_steps = -1) {
    const int n_stocks = static_cast<int>(net.num_stocks());
    if (max_steps < 0) max_steps = n_stocks;

    // stock -> investor -> weight, and the transpose
    std::map<int, std::map<int, double>> by_stock;
    std::map<int, std::map<int, double>> by_investor;
    for (const auto& e : net.edges()) {
        by_stock[e.stock][e.investor] = e.weight;
        by_investor[e.investor][e.stock] = e.weight;
    }
    std::map<int, double> s0;
    for (const auto& [i, holders] : by_stock) {
        double s = 0.0;
        for (const auto& [m, w] : holders) s += w;
        s0[i] = s;
    }

    NaiveResult result;
    result.failed.insert(shocked_stock);
    result.timeline.push_back({shocked_stock});
    std::set<int> frontier{shocked_stock};

    int tau = 0;
    while (!frontier.empty()) {
        // investors holding any frontier stock at positive weight
        std::set<int> infected;
        for (int s : frontier)
            for (const auto& [m, w] : by_stock[s])
                if (w > 0.0) infected.insert(m);

        for (int m : infected) {
            double before = 0.0;
            for (const auto& [s, w] : by_investor[m]) before += w;
            double removed = 0.0;
            for (const auto& [s, w] : by_investor[m])
                if (frontier.count(s)) removed += w;
            double after = before - removed;
            double factor = before > 0.0 ? alpha * (after / before) : 0.0;
            for (auto& [s, w] : by_investor[m]) {
                if (result.failed.count(s))
                    w = 0.0;
                else
                    w *= factor;
                by_stock[s][m] = w;
            }
        }

        ++tau;
        std::vector<int> next;
        for (const auto& [i, holders] : by_stock) {
            if (result.failed.count(i)) continue;
            double s = 0.0;
            for (const auto& [m, w] : holders) s += w;
            if (s0[i] <= 0.0) continue;
            if ((s - s0[i]) / s0[i] <= -c) next.push_back(i);
        }
        if (next.empty()) break;
        for (int i : next) result.failed.insert(i);
        result.timeline.push_back(next);
        if (tau >= max_steps) break;
        frontier = std::set<int>(next.begin(), next.end());
    }
    return result;
}

}  // namespace stockcascade::testing

#endif
