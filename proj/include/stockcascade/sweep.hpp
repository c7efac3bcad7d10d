#ifndef STOCKCASCADE_SWEEP_HPP
#define STOCKCASCADE_SWEEP_HPP

#include <cstddef>
#include <vector>

#include "stockcascade/cascade.hpp"
#include "stockcascade/critical.hpp"
#include "stockcascade/parallel.hpp"

namespace stockcascade {

struct SweepCell {
    double c = 0.0;
    double alpha = 0.0;
    int shock = 0;
    double failed_fraction = 0.0;
    bool collapsed = false;
};

struct ShockAlphaC {
    double c = 0.0;
    int shock = 0;
    AlphaC alpha_c;
};

struct SweepAggregate {
    double c = 0.0;
    double mean_alpha_c = 0.0;
    double max_alpha_c = 0.0;
    std::size_t n_values = 0;     // shocks with a numeric alpha_c
    std::size_t n_sentinels = 0;  // never-/always-collapses shocks
};

struct SweepResult {
    std::vector<SweepCell> grid;               // (c, alpha, shock), canonical order
    std::vector<ShockAlphaC> alpha_c_per_shock;  // (c, shock), canonical order
    std::vector<SweepAggregate> aggregate;     // one row per c
};

// Full (c, alpha, shock) grid plus bisected alpha_c per (c, shock) and the
// per-c mean/max aggregate. Cells are independent tasks; output order is
// canonical regardless of thread count.
inline SweepResult run_sweep(const BipartiteNetwork& net, const std::vector<double>& c_grid,
                             const std::vector<double>& alpha_grid, double collapse_threshold = 0.5,
                             double tol = 1e-3, int max_steps = -1, int threads = 1) {
    const std::size_t n_stocks = net.num_stocks();
    SweepResult out;

    out.grid.resize(c_grid.size() * alpha_grid.size() * n_stocks);
    parallel_for(out.grid.size(), threads, [&](std::size_t idx) {
        std::size_t shock = idx % n_stocks;
        std::size_t rest = idx / n_stocks;
        std::size_t ai = rest % alpha_grid.size();
        std::size_t ci = rest / alpha_grid.size();
        SweepCell& cell = out.grid[idx];
        cell.c = c_grid[ci];
        cell.alpha = alpha_grid[ai];
        cell.shock = static_cast<int>(shock);
        CascadeResult r = run_cascade(net, static_cast<int>(shock), cell.alpha, cell.c, max_steps);
        cell.failed_fraction = r.final_failed_fraction;
        cell.collapsed = r.final_failed_fraction >= collapse_threshold;
    });

    out.alpha_c_per_shock.resize(c_grid.size() * n_stocks);
    parallel_for(out.alpha_c_per_shock.size(), threads, [&](std::size_t idx) {
        std::size_t shock = idx % n_stocks;
        std::size_t ci = idx / n_stocks;
        ShockAlphaC& row = out.alpha_c_per_shock[idx];
        row.c = c_grid[ci];
        row.shock = static_cast<int>(shock);
        row.alpha_c = find_alpha_c(net, static_cast<int>(shock), row.c, collapse_threshold, tol,
                                   max_steps);
    });

    for (std::size_t ci = 0; ci < c_grid.size(); ++ci) {
        SweepAggregate agg;
        agg.c = c_grid[ci];
        double sum = 0.0, best = 0.0;
        for (std::size_t s = 0; s < n_stocks; ++s) {
            const AlphaC& a = out.alpha_c_per_shock[ci * n_stocks + s].alpha_c;
            if (a.is_value()) {
                sum += a.alpha_c;
                if (a.alpha_c > best) best = a.alpha_c;
                ++agg.n_values;
            } else {
                ++agg.n_sentinels;
            }
        }
        if (agg.n_values > 0) {
            agg.mean_alpha_c = sum / agg.n_values;
            agg.max_alpha_c = best;
        }
        out.aggregate.push_back(agg);
    }
    return out;
}

}  // namespace stockcascade

#endif  // STOCKCASCADE_SWEEP_HPP
