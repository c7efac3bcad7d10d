#ifndef STOCKCASCADE_TESTS_FIXTURES_HPP
#define STOCKCASCADE_TESTS_FIXTURES_HPP

#include <random>
#include <string>
#include <vector>

#include "stockcascade/network.hpp"

namespace stockcascade::testing {

inline BipartiteNetwork from_records(const std::vector<HoldingRecord>& records) {
    return load_holdings(records).net;
}

// Toy T1: C1 holds {S2, S3}, C2 holds {S1, S2}, all weights 1.
inline BipartiteNetwork toy_t1() {
    return from_records({{"C1", "S2", 1.0},
                         {"C1", "S3", 1.0},
                         {"C2", "S1", 1.0},
                         {"C2", "S2", 1.0}});
}

// Toy T2: one investor C holding S1 and S2 with weight 1 each.
inline BipartiteNetwork toy_t2() {
    return from_records({{"C", "S1", 1.0}, {"C", "S2", 1.0}});
}

// Random connected-ish bipartite network: every stock gets at least one
// holder, plus extra uniformly random edges. Weights uniform in (0, 1].
inline BipartiteNetwork random_network(std::mt19937_64& rng, int n_stocks, int n_investors,
                                       int extra_edges) {
    std::uniform_int_distribution<int> pick_inv(0, n_investors - 1);
    std::uniform_int_distribution<int> pick_stock(0, n_stocks - 1);
    std::uniform_real_distribution<double> weight(1e-6, 1.0);
    std::vector<HoldingRecord> records;
    auto id = [](const char* prefix, int k) { return std::string(prefix) + std::to_string(k); };
    for (int s = 0; s < n_stocks; ++s)
        records.push_back({id("I", pick_inv(rng)), id("S", s), weight(rng)});
    for (int e = 0; e < extra_edges; ++e)
        records.push_back({id("I", pick_inv(rng)), id("S", pick_stock(rng)), weight(rng)});
    return from_records(records);
}

}  // namespace stockcascade::testing

#endif
