#ifndef STOCKCASCADE_RANDOMIZE_HPP
#define STOCKCASCADE_RANDOMIZE_HPP

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "stockcascade/critical.hpp"
#include "stockcascade/network.hpp"
#include "stockcascade/parallel.hpp"
#include "stockcascade/stats.hpp"

namespace stockcascade {

namespace detail {

// splitmix64; used to derive independent per-task seeds.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4b9a6c39c71ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(seed ^ mix_seed(a)) ^ mix_seed(b));
}

}  // namespace detail

// Deletes floor(p * E) uniformly chosen edges and generates the same number
// of fresh stock-investor edges uniformly among unoccupied pairs. All edge
// weights in the output are set to 1.0 and node sets are preserved, so the
// edge count is invariant. Deterministic for a fixed seed.
inline BipartiteNetwork partial_rewire(const BipartiteNetwork& net, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("partial_rewire: p outside [0,1]");
    const std::size_t n_edges = net.num_edges();
    const std::size_t n_stocks = net.num_stocks();
    const std::size_t n_investors = net.num_investors();
    const std::size_t n_rewire = static_cast<std::size_t>(p * static_cast<double>(n_edges));
    if (n_edges > n_stocks * n_investors)
        throw std::runtime_error("partial_rewire: more edges than available pairs");

    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: the first n_rewire entries are the deleted edges.
    std::vector<std::size_t> order(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e) order[e] = e;
    for (std::size_t k = 0; k < n_rewire; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, n_edges - 1);
        std::swap(order[k], order[pick(rng)]);
    }

    auto pair_key = [n_investors](int stock, int investor) {
        return static_cast<std::uint64_t>(stock) * n_investors + investor;
    };
    std::unordered_set<std::uint64_t> occupied;
    std::map<std::pair<int, int>, double> weight_map;
    for (std::size_t k = n_rewire; k < n_edges; ++k) {
        const auto& edge = net.edges()[order[k]];
        occupied.insert(pair_key(edge.stock, edge.investor));
        weight_map[{edge.stock, edge.investor}] = 1.0;
    }

    std::uniform_int_distribution<int> pick_stock(0, static_cast<int>(n_stocks) - 1);
    std::uniform_int_distribution<int> pick_investor(0, static_cast<int>(n_investors) - 1);
    const std::size_t max_attempts = 1000 * n_rewire + 1000;
    std::size_t attempts = 0;
    for (std::size_t placed = 0; placed < n_rewire;) {
        if (++attempts > max_attempts)
            throw std::runtime_error("partial_rewire: could not place edges without duplicates");
        int s = pick_stock(rng);
        int m = pick_investor(rng);
        if (!occupied.insert(pair_key(s, m)).second) continue;
        weight_map[{s, m}] = 1.0;
        ++placed;
    }
    return BipartiteNetwork(net.stock_ids(), net.investor_ids(), weight_map);
}

struct RandomizationPoint {
    double p = 0.0;
    double c = 0.0;
    double mean_alpha_c = 0.0;
    std::size_t n_trials = 0;    // trials contributing a numeric alpha_c
    std::size_t n_excluded = 0;  // sentinel outcomes
};

struct RandomizationFit {
    double p = 0.0;
    LinearFit fit;
    std::size_t points_used = 0;
};

struct RandomizationResult {
    std::vector<RandomizationPoint> points;  // one per (p, c), in input order
    std::vector<RandomizationFit> fits;      // one per p
};

// For each p and trial: rewire, shock one uniformly chosen non-isolated
// stock, bisect alpha_c per c. Mean alpha_c is fit against c per p, dropping
// sentinel outcomes and points with mean alpha_c below `fit_exclude_below`.
// Per-trial seeds are derived from (seed, p index, trial), so the schedule
// of parallel workers never changes the outcome.
inline RandomizationResult randomization_experiment(
    const BipartiteNetwork& net, const std::vector<double>& p_list, int trials,
    const std::vector<double>& c_grid, double collapse_threshold = 0.5, double tol = 1e-3,
    std::uint64_t seed = 0, int threads = 1, double fit_exclude_below = 0.02) {
    if (trials < 1) throw std::invalid_argument("randomization_experiment: trials must be >= 1");
    const std::size_t n_p = p_list.size(), n_c = c_grid.size();
    const std::size_t n_tasks = n_p * static_cast<std::size_t>(trials);

    // alpha_c per (p, trial, c); NaN marks a sentinel outcome.
    std::vector<std::vector<double>> per_task(n_tasks);
    parallel_for(n_tasks, threads, [&](std::size_t task) {
        const std::size_t pi = task / trials;
        const std::size_t trial = task % trials;
        std::uint64_t task_seed = detail::derive_seed(seed, pi, trial);
        BipartiteNetwork rnet = partial_rewire(net, p_list[pi], task_seed);
        std::mt19937_64 rng(detail::mix_seed(task_seed));
        std::vector<int> candidates;
        for (int i = 0; i < static_cast<int>(rnet.num_stocks()); ++i)
            if (rnet.stock_degree(i) > 0) candidates.push_back(i);
        if (candidates.empty()) throw std::runtime_error("randomization_experiment: empty network");
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        int shock = candidates[pick(rng)];
        auto& row = per_task[task];
        row.assign(n_c, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t ci = 0; ci < n_c; ++ci) {
            AlphaC a = find_alpha_c(rnet, shock, c_grid[ci], collapse_threshold, tol);
            if (a.is_value()) row[ci] = a.alpha_c;
        }
    });

    RandomizationResult out;
    for (std::size_t pi = 0; pi < n_p; ++pi) {
        std::vector<double> xs, ys;
        for (std::size_t ci = 0; ci < n_c; ++ci) {
            RandomizationPoint pt;
            pt.p = p_list[pi];
            pt.c = c_grid[ci];
            double sum = 0.0;
            for (int t = 0; t < trials; ++t) {
                double v = per_task[pi * trials + t][ci];
                if (std::isnan(v)) {
                    ++pt.n_excluded;
                } else {
                    sum += v;
                    ++pt.n_trials;
                }
            }
            if (pt.n_trials > 0) {
                pt.mean_alpha_c = sum / pt.n_trials;
                if (pt.mean_alpha_c >= fit_exclude_below) {
                    xs.push_back(pt.c);
                    ys.push_back(pt.mean_alpha_c);
                }
            }
            out.points.push_back(pt);
        }
        RandomizationFit fit;
        fit.p = p_list[pi];
        fit.fit = linear_fit(xs, ys);
        fit.points_used = xs.size();
        out.fits.push_back(fit);
    }
    return out;
}

}  // namespace stockcascade

#endif  // STOCKCASCADE_RANDOMIZE_HPP
