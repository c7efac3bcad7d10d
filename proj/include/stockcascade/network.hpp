#ifndef STOCKCASCADE_NETWORK_HPP
#define STOCKCASCADE_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace stockcascade {

// One parsed holdings record. `line` is the 1-based source line for error
// reporting; 0 when the record was built programmatically.
struct HoldingRecord {
    std::string investor_id;
    std::string stock_id;
    double market_value = 0.0;
    std::size_t line = 0;
};

struct RejectedRecord {
    std::size_t line;
    std::string reason;
};

// Immutable weighted bipartite investor-stock network. Node ids are opaque
// strings; dense indices are assigned in lexicographic id order so that
// construction is invariant to input record order. Edges are stored once,
// sorted by (stock, investor), with per-stock and per-investor index lists
// into the shared edge array. Safe for concurrent reads after construction.
class BipartiteNetwork {
public:
    struct Edge {
        int stock;
        int investor;
        double weight;
    };

    BipartiteNetwork() = default;

    // Builds the network from id lists and a (stock, investor) -> weight map.
    // Keeps isolated stocks; used by the rewiring code where the node sets
    // must stay fixed.
    BipartiteNetwork(std::vector<std::string> stock_ids,
                     std::vector<std::string> investor_ids,
                     const std::map<std::pair<int, int>, double>& weight_map)
        : stock_ids_(std::move(stock_ids)), investor_ids_(std::move(investor_ids)) {
        edges_.reserve(weight_map.size());
        for (const auto& [key, w] : weight_map) {
            if (!(w > 0.0) || !std::isfinite(w))
                throw std::invalid_argument("edge weight must be finite and positive");
            edges_.push_back({key.first, key.second, w});
        }
        build_index();
    }

    std::size_t num_stocks() const { return stock_ids_.size(); }
    std::size_t num_investors() const { return investor_ids_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    const std::vector<std::string>& stock_ids() const { return stock_ids_; }
    const std::vector<std::string>& investor_ids() const { return investor_ids_; }
    const std::vector<Edge>& edges() const { return edges_; }

    const std::vector<int>& stock_edges(int stock) const { return stock_edges_[stock]; }
    const std::vector<int>& investor_edges(int investor) const { return investor_edges_[investor]; }

    int stock_degree(int stock) const { return static_cast<int>(stock_edges_[stock].size()); }
    int investor_degree(int investor) const { return static_cast<int>(investor_edges_[investor].size()); }

    // S_{i,0} and A_{m,0}: cached row/column sums of the weight matrix.
    double stock_value(int stock) const { return stock_value_[stock]; }
    double investor_value(int investor) const { return investor_value_[investor]; }
    const std::vector<double>& stock_values() const { return stock_value_; }
    const std::vector<double>& investor_values() const { return investor_value_; }

    int stock_index(const std::string& id) const {
        auto it = stock_lookup_.find(id);
        return it == stock_lookup_.end() ? -1 : it->second;
    }
    int investor_index(const std::string& id) const {
        auto it = investor_lookup_.find(id);
        return it == investor_lookup_.end() ? -1 : it->second;
    }

private:
    friend struct NetworkBuilder;

    void build_index() {
        std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
            return std::tie(a.stock, a.investor) < std::tie(b.stock, b.investor);
        });
        stock_edges_.assign(stock_ids_.size(), {});
        investor_edges_.assign(investor_ids_.size(), {});
        stock_value_.assign(stock_ids_.size(), 0.0);
        investor_value_.assign(investor_ids_.size(), 0.0);
        for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
            const Edge& edge = edges_[e];
            stock_edges_[edge.stock].push_back(e);
            investor_edges_[edge.investor].push_back(e);
        }
        // Sums run in canonical edge order so repeated loads are bit-identical.
        for (std::size_t i = 0; i < stock_edges_.size(); ++i)
            for (int e : stock_edges_[i]) stock_value_[i] += edges_[e].weight;
        for (std::size_t m = 0; m < investor_edges_.size(); ++m)
            for (int e : investor_edges_[m]) investor_value_[m] += edges_[e].weight;
        for (std::size_t i = 0; i < stock_ids_.size(); ++i)
            stock_lookup_.emplace(stock_ids_[i], static_cast<int>(i));
        for (std::size_t m = 0; m < investor_ids_.size(); ++m)
            investor_lookup_.emplace(investor_ids_[m], static_cast<int>(m));
    }

    std::vector<std::string> stock_ids_;
    std::vector<std::string> investor_ids_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> stock_edges_;
    std::vector<std::vector<int>> investor_edges_;
    std::vector<double> stock_value_;
    std::vector<double> investor_value_;
    std::unordered_map<std::string, int> stock_lookup_;
    std::unordered_map<std::string, int> investor_lookup_;
};

struct LoadResult {
    BipartiteNetwork net;
    std::vector<RejectedRecord> rejected;
    std::size_t dropped_isolated_stocks = 0;
    std::size_t merged_duplicates = 0;
};

// Builds a BipartiteNetwork from raw holdings records. Duplicate
// (investor, stock) pairs are summed into one edge. Non-positive or
// non-finite values are rejected per record; an input that yields no valid
// edge is a fatal error.
inline LoadResult load_holdings(const std::vector<HoldingRecord>& records) {
    LoadResult out;
    std::map<std::pair<std::string, std::string>, double> agg;  // (stock, investor) -> weight
    for (const auto& rec : records) {
        if (!std::isfinite(rec.market_value)) {
            out.rejected.push_back({rec.line, "non-finite market value"});
            continue;
        }
        if (rec.market_value <= 0.0) {
            out.rejected.push_back({rec.line, "non-positive market value"});
            continue;
        }
        auto [it, inserted] = agg.emplace(std::make_pair(rec.stock_id, rec.investor_id), rec.market_value);
        if (!inserted) {
            it->second += rec.market_value;
            ++out.merged_duplicates;
        }
    }
    if (agg.empty()) throw std::runtime_error("load_holdings: no valid holdings records");

    std::vector<std::string> stock_ids, investor_ids;
    for (const auto& [key, w] : agg) {
        stock_ids.push_back(key.first);
        investor_ids.push_back(key.second);
    }
    std::sort(stock_ids.begin(), stock_ids.end());
    stock_ids.erase(std::unique(stock_ids.begin(), stock_ids.end()), stock_ids.end());
    std::sort(investor_ids.begin(), investor_ids.end());
    investor_ids.erase(std::unique(investor_ids.begin(), investor_ids.end()), investor_ids.end());

    std::unordered_map<std::string, int> sidx, iidx;
    for (std::size_t i = 0; i < stock_ids.size(); ++i) sidx[stock_ids[i]] = static_cast<int>(i);
    for (std::size_t m = 0; m < investor_ids.size(); ++m) iidx[investor_ids[m]] = static_cast<int>(m);

    std::map<std::pair<int, int>, double> weight_map;
    for (const auto& [key, w] : agg)
        weight_map[{sidx.at(key.first), iidx.at(key.second)}] = w;

    // Every stock in `agg` has at least one edge, so no isolated stocks can
    // appear on this path; the counter exists for callers that pre-filter.
    out.net = BipartiteNetwork(std::move(stock_ids), std::move(investor_ids), weight_map);
    return out;
}

struct GroupResult {
    std::vector<HoldingRecord> records;
    std::size_t unmapped_funds = 0;
};

// Re-keys fund-level records to company level; weights of the same
// (company, stock) pair are summed downstream by load_holdings. Funds
// missing from the mapping pass through under their own id.
inline GroupResult group_by_mapping(const std::vector<HoldingRecord>& records,
                                    const std::unordered_map<std::string, std::string>& mapping) {
    GroupResult out;
    std::vector<std::string> seen_unmapped;
    out.records.reserve(records.size());
    for (const auto& rec : records) {
        HoldingRecord r = rec;
        auto it = mapping.find(rec.investor_id);
        if (it != mapping.end()) {
            r.investor_id = it->second;
        } else {
            seen_unmapped.push_back(rec.investor_id);
        }
        out.records.push_back(std::move(r));
    }
    std::sort(seen_unmapped.begin(), seen_unmapped.end());
    seen_unmapped.erase(std::unique(seen_unmapped.begin(), seen_unmapped.end()), seen_unmapped.end());
    out.unmapped_funds = seen_unmapped.size();
    return out;
}

// Unweighted undirected one-mode projection: stocks are adjacent iff they
// share at least one investor. Adjacency lists are sorted, no self-loops.
class StockGraph {
public:
    StockGraph() = default;
    explicit StockGraph(std::vector<std::vector<int>> adjacency)
        : adjacency_(std::move(adjacency)) {}

    std::size_t num_nodes() const { return adjacency_.size(); }
    const std::vector<int>& neighbors(int node) const { return adjacency_[node]; }
    int degree(int node) const { return static_cast<int>(adjacency_[node].size()); }

    bool has_edge(int a, int b) const {
        const auto& adj = adjacency_[a];
        return std::binary_search(adj.begin(), adj.end(), b);
    }

private:
    std::vector<std::vector<int>> adjacency_;
};

inline StockGraph stock_projection(const BipartiteNetwork& net) {
    std::vector<std::vector<int>> adj(net.num_stocks());
    for (std::size_t m = 0; m < net.num_investors(); ++m) {
        const auto& held = net.investor_edges(static_cast<int>(m));
        for (std::size_t a = 0; a < held.size(); ++a) {
            for (std::size_t b = a + 1; b < held.size(); ++b) {
                int i = net.edges()[held[a]].stock;
                int j = net.edges()[held[b]].stock;
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
        }
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return StockGraph(std::move(adj));
}

}  // namespace stockcascade

#endif  // STOCKCASCADE_NETWORK_HPP
