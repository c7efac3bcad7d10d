#ifndef STOCKCASCADE_CASCADE_HPP
#define STOCKCASCADE_CASCADE_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "stockcascade/network.hpp"

namespace stockcascade {

// Outcome of one cascade run. timeline[0] is the initial shock set; later
// entries are the stocks that failed at that step. `steps` is the step at
// which the frontier came up empty (or propagation was cut off).
struct CascadeResult {
    std::vector<std::vector<int>> timeline;
    double final_failed_fraction = 0.0;
    int steps = 0;
    double surviving_market_value = 0.0;
    bool truncated = false;

    std::size_t total_failed() const {
        std::size_t n = 0;
        for (const auto& f : timeline) n += f.size();
        return n;
    }
};

// Runs the price-limit cascade: initially shocked stocks are marked failed
// and removed; each step every investor holding a stock that just failed
// scales its remaining live holdings by alpha * (A_after / A_before), where
// the ratio is the investor's portfolio value with the failed edges removed
// over its value before removal, both at current weights. A live stock fails
// as soon as its value has dropped by at least fraction c of its original
// value (inclusive, compared against S_{i,0}). Failed stocks never recover.
//
// max_steps < 0 means the termination bound |stocks|. If the bound is hit
// with a nonempty frontier the result is flagged truncated.
inline CascadeResult run_cascade(const BipartiteNetwork& net, std::span<const int> initial_shock,
                                 double alpha, double c, int max_steps = -1) {
    const int n_stocks = static_cast<int>(net.num_stocks());
    const int n_investors = static_cast<int>(net.num_investors());
    if (initial_shock.empty()) throw std::invalid_argument("run_cascade: empty initial shock");
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("run_cascade: alpha outside [0,1]");
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("run_cascade: c outside (0,1)");
    if (max_steps < 0) max_steps = n_stocks;

    std::vector<double> weight(net.num_edges());
    for (std::size_t e = 0; e < weight.size(); ++e) weight[e] = net.edges()[e].weight;
    std::vector<double> stock_now = net.stock_values();
    std::vector<double> investor_now = net.investor_values();
    std::vector<char> failed(n_stocks, 0);
    std::vector<char> in_frontier(n_stocks, 0);
    std::vector<char> infected(n_investors, 0);

    CascadeResult result;
    std::vector<int> frontier;
    for (int s : initial_shock) {
        if (s < 0 || s >= n_stocks) throw std::invalid_argument("run_cascade: shocked stock not in network");
        if (!failed[s]) {
            failed[s] = 1;
            frontier.push_back(s);
        }
    }
    std::sort(frontier.begin(), frontier.end());
    result.timeline.push_back(frontier);

    int tau = 0;
    while (!frontier.empty()) {
        for (int s : frontier) in_frontier[s] = 1;

        // L_tau: investors currently holding any frontier stock.
        std::vector<int> infected_list;
        for (int s : frontier) {
            for (int e : net.stock_edges(s)) {
                int m = net.edges()[e].investor;
                if (weight[e] > 0.0 && !infected[m]) {
                    infected[m] = 1;
                    infected_list.push_back(m);
                }
            }
        }
        std::sort(infected_list.begin(), infected_list.end());

        for (int m : infected_list) {
            double before = investor_now[m];
            double removed = 0.0;
            for (int e : net.investor_edges(m))
                if (in_frontier[net.edges()[e].stock]) removed += weight[e];
            double after = before - removed;
            double factor = before > 0.0 ? alpha * (after / before) : 0.0;
            for (int e : net.investor_edges(m)) {
                int s = net.edges()[e].stock;
                if (failed[s]) {
                    weight[e] = 0.0;  // frontier and earlier-failed edges are fully illiquid
                } else {
                    weight[e] *= factor;
                }
            }
        }

        // Recompute S and A from the edge weights in canonical order; the
        // incremental alternative sums in a different order and can flip
        // the exact threshold comparison against a reference recomputation.
        for (int i = 0; i < n_stocks; ++i) {
            if (failed[i]) continue;
            double s = 0.0;
            for (int e : net.stock_edges(i)) s += weight[e];
            stock_now[i] = s;
        }
        for (int m = 0; m < n_investors; ++m) {
            double a = 0.0;
            for (int e : net.investor_edges(m)) a += weight[e];
            investor_now[m] = a;
        }

        for (int s : frontier) in_frontier[s] = 0;
        for (int m : infected_list) infected[m] = 0;

        ++tau;
        std::vector<int> next;
        for (int i = 0; i < n_stocks; ++i) {
            if (failed[i]) continue;
            double s0 = net.stock_value(i);
            if (s0 <= 0.0) continue;  // isolated stock, cannot fail
            if ((stock_now[i] - s0) / s0 <= -c) next.push_back(i);
        }
        if (next.empty()) break;
        for (int i : next) failed[i] = 1;
        result.timeline.push_back(next);
        if (tau >= max_steps) {
            result.truncated = true;
            break;
        }
        frontier = std::move(next);
    }

    result.steps = tau;
    result.final_failed_fraction =
        n_stocks == 0 ? 0.0 : static_cast<double>(result.total_failed()) / n_stocks;
    double surviving = 0.0;
    for (int i = 0; i < n_stocks; ++i)
        if (!failed[i]) surviving += stock_now[i];
    result.surviving_market_value = surviving;
    return result;
}

inline CascadeResult run_cascade(const BipartiteNetwork& net, int shocked_stock, double alpha,
                                 double c, int max_steps = -1) {
    int shock[1] = {shocked_stock};
    return run_cascade(net, std::span<const int>(shock, 1), alpha, c, max_steps);
}

// One independent cascade per stock, each from pristine state. Results are
// indexed by stock, so parallel callers can fill slots independently.
inline std::vector<CascadeResult> run_all_single_shocks(const BipartiteNetwork& net, double alpha,
                                                        double c, int max_steps = -1) {
    std::vector<CascadeResult> results(net.num_stocks());
    for (int i = 0; i < static_cast<int>(net.num_stocks()); ++i)
        results[i] = run_cascade(net, i, alpha, c, max_steps);
    return results;
}

}  // namespace stockcascade

#endif  // STOCKCASCADE_CASCADE_HPP
