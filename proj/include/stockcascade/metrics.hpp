#ifndef STOCKCASCADE_METRICS_HPP
#define STOCKCASCADE_METRICS_HPP

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "stockcascade/network.hpp"

namespace stockcascade {

// nestedness of stock i on stock j: fraction of i's investors who also hold
// j. Asymmetric; nestedness(i, i) is 1 by convention.
inline double nestedness(const BipartiteNetwork& net, int i, int j) {
    if (net.stock_degree(i) < 1) throw std::invalid_argument("nestedness: stock i has no investor");
    if (i == j) return 1.0;
    std::vector<char> holds_j(net.num_investors(), 0);
    for (int e : net.stock_edges(j)) holds_j[net.edges()[e].investor] = 1;
    int common = 0;
    for (int e : net.stock_edges(i))
        if (holds_j[net.edges()[e].investor]) ++common;
    return static_cast<double>(common) / net.stock_degree(i);
}

// branching of stock i: highest degree among i's investors over i's degree.
inline double branching(const BipartiteNetwork& net, int i) {
    if (net.stock_degree(i) < 1) throw std::invalid_argument("branching: stock has no investor");
    int best = 0;
    for (int e : net.stock_edges(i))
        best = std::max(best, net.investor_degree(net.edges()[e].investor));
    return static_cast<double>(best) / net.stock_degree(i);
}

// Mean of nestedness(i on j) over the projection neighbors of i. NaN when i
// has no projection neighbor.
inline double average_nestedness(const BipartiteNetwork& net, const StockGraph& projection, int i) {
    const auto& nbrs = projection.neighbors(i);
    if (nbrs.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (int j : nbrs) sum += nestedness(net, i, j);
    return sum / nbrs.size();
}

// k-core decomposition by iterative minimum-degree peeling (bucket order).
// Returns for each node the largest k such that the node survives the k-core.
inline std::vector<int> k_core_index(const StockGraph& graph) {
    const int n = static_cast<int>(graph.num_nodes());
    std::vector<int> degree(n), core(n, 0);
    int max_degree = 0;
    for (int v = 0; v < n; ++v) {
        degree[v] = graph.degree(v);
        max_degree = std::max(max_degree, degree[v]);
    }
    std::vector<std::vector<int>> buckets(max_degree + 1);
    for (int v = 0; v < n; ++v) buckets[degree[v]].push_back(v);
    std::vector<char> removed(n, 0);
    int current = 0;
    for (int d = 0; d <= max_degree; ++d) {
        auto& bucket = buckets[d];
        for (std::size_t idx = 0; idx < bucket.size(); ++idx) {
            int v = bucket[idx];
            if (removed[v] || degree[v] != d) continue;
            current = std::max(current, d);
            core[v] = current;
            removed[v] = 1;
            for (int u : graph.neighbors(v)) {
                if (removed[u] || degree[u] <= d) continue;
                --degree[u];  // stays >= d, so no bucket below the shell is touched
                buckets[degree[u]].push_back(u);
            }
        }
    }
    return core;
}

struct KnnDegree {
    std::map<int, double> stocks;     // stock degree k -> mean neighbor (investor) degree
    std::map<int, double> investors;  // investor degree k -> mean neighbor (stock) degree
};

// Average nearest-neighbor degree per degree class, for both sides of the
// bipartite graph.
inline KnnDegree knn_degree(const BipartiteNetwork& net) {
    KnnDegree out;
    std::map<int, std::pair<double, int>> acc_s, acc_i;
    for (int i = 0; i < static_cast<int>(net.num_stocks()); ++i) {
        int d = net.stock_degree(i);
        if (d == 0) continue;
        double mean = 0.0;
        for (int e : net.stock_edges(i)) mean += net.investor_degree(net.edges()[e].investor);
        mean /= d;
        acc_s[d].first += mean;
        acc_s[d].second += 1;
    }
    for (int m = 0; m < static_cast<int>(net.num_investors()); ++m) {
        int d = net.investor_degree(m);
        if (d == 0) continue;
        double mean = 0.0;
        for (int e : net.investor_edges(m)) mean += net.stock_degree(net.edges()[e].stock);
        mean /= d;
        acc_i[d].first += mean;
        acc_i[d].second += 1;
    }
    for (const auto& [k, v] : acc_s) out.stocks[k] = v.first / v.second;
    for (const auto& [k, v] : acc_i) out.investors[k] = v.first / v.second;
    return out;
}

struct StockMetricsRow {
    std::string stock_id;
    int degree = 0;
    double branching = 0.0;
    double avg_nestedness = 0.0;  // NaN when isolated in the projection
    int k_core = 0;
    double p_d = 0.0;
};

inline std::vector<StockMetricsRow> metrics_table(const BipartiteNetwork& net,
                                                  const StockGraph& projection,
                                                  const std::vector<int>& k_core,
                                                  const std::vector<double>& p_d) {
    std::vector<StockMetricsRow> rows(net.num_stocks());
    for (int i = 0; i < static_cast<int>(net.num_stocks()); ++i) {
        rows[i].stock_id = net.stock_ids()[i];
        rows[i].degree = net.stock_degree(i);
        rows[i].branching = net.stock_degree(i) > 0 ? branching(net, i) : 0.0;
        rows[i].avg_nestedness = average_nestedness(net, projection, i);
        rows[i].k_core = k_core[i];
        rows[i].p_d = i < static_cast<int>(p_d.size()) ? p_d[i] : 0.0;
    }
    return rows;
}

}  // namespace stockcascade

#endif  // STOCKCASCADE_METRICS_HPP
