#ifndef STOCKCASCADE_CRITICAL_HPP
#define STOCKCASCADE_CRITICAL_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "stockcascade/cascade.hpp"
#include "stockcascade/network.hpp"
#include "stockcascade/stats.hpp"

namespace stockcascade {

enum class AlphaCiFlag {
    ok,
    cannot_fail,     // numerator negative: target survives even at alpha = 0; value clamped to 0
    unavoidable,     // value > 1: no confidence level prevents the failure
    indeterminate,   // zero denominator
};

struct AlphaCi {
    double value = 0.0;
    AlphaCiFlag flag = AlphaCiFlag::ok;
};

namespace detail {

inline void check_neighbor_args(const BipartiteNetwork& net, int shock, int target) {
    if (shock == target) throw std::invalid_argument("neighbor_alpha_c: target equals shock");
    if (shock < 0 || shock >= static_cast<int>(net.num_stocks()) || target < 0 ||
        target >= static_cast<int>(net.num_stocks()))
        throw std::invalid_argument("neighbor_alpha_c: stock index out of range");
}

inline AlphaCi classify(double numerator, double denominator) {
    AlphaCi out;
    if (denominator == 0.0) {
        out.flag = AlphaCiFlag::indeterminate;
        out.value = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.value = numerator / denominator;
    if (out.value < 0.0) {
        out.value = 0.0;
        out.flag = AlphaCiFlag::cannot_fail;
    } else if (out.value > 1.0) {
        out.flag = AlphaCiFlag::unavoidable;
    }
    return out;
}

}  // namespace detail

// Confidence needed to keep `target` alive one step after `shock` fails:
//   [(1-c) S_t0 - sum_{m not in L} w_{t,m,0}]
//     / [sum_{m in L} (1 - w_{shock,m,0}/A_{m,0}) w_{t,m,0}]
// with L the holders of the shocked stock. Throws if the two stocks share
// no investor.
inline AlphaCi neighbor_alpha_c(const BipartiteNetwork& net, int shock, int target, double c) {
    detail::check_neighbor_args(net, shock, target);
    std::vector<char> holds_shock(net.num_investors(), 0);
    std::vector<double> shock_weight(net.num_investors(), 0.0);
    for (int e : net.stock_edges(shock)) {
        holds_shock[net.edges()[e].investor] = 1;
        shock_weight[net.edges()[e].investor] = net.edges()[e].weight;
    }
    double outside = 0.0, denominator = 0.0;
    bool common = false;
    for (int e : net.stock_edges(target)) {
        int m = net.edges()[e].investor;
        double w = net.edges()[e].weight;
        if (holds_shock[m]) {
            common = true;
            denominator += (1.0 - shock_weight[m] / net.investor_value(m)) * w;
        } else {
            outside += w;
        }
    }
    if (!common) throw std::invalid_argument("neighbor_alpha_c: stocks share no investor");
    double numerator = (1.0 - c) * net.stock_value(target) - outside;
    return detail::classify(numerator, denominator);
}

// Simplified boundary value: same numerator over sum_{m in L} w_{t,m,0}.
// When the target's investors are all holders of the shock the value is
// returned as exactly 1 - c (numerator and denominator share S_t0).
inline AlphaCi neighbor_alpha_c_simplified(const BipartiteNetwork& net, int shock, int target,
                                           double c) {
    detail::check_neighbor_args(net, shock, target);
    std::vector<char> holds_shock(net.num_investors(), 0);
    for (int e : net.stock_edges(shock)) holds_shock[net.edges()[e].investor] = 1;
    double outside = 0.0, inside = 0.0;
    bool common = false, has_outside = false;
    for (int e : net.stock_edges(target)) {
        int m = net.edges()[e].investor;
        double w = net.edges()[e].weight;
        if (holds_shock[m]) {
            common = true;
            inside += w;
        } else {
            has_outside = true;
            outside += w;
        }
    }
    if (!common) throw std::invalid_argument("neighbor_alpha_c_simplified: stocks share no investor");
    if (!has_outside) return AlphaCi{1.0 - c, AlphaCiFlag::ok};  // full nestedness
    double numerator = (1.0 - c) * net.stock_value(target) - outside;
    return detail::classify(numerator, inside);
}

struct AlphaC {
    enum Kind { value, never_collapses, always_collapses } kind = value;
    double alpha_c = 0.0;

    bool is_value() const { return kind == value; }
};

// Bisection for the critical confidence of one shocked stock: collapse(alpha)
// is final_failed_fraction >= collapse_threshold, monotone non-increasing in
// alpha. Returns the bracketing midpoint, or a sentinel when the system
// collapses even at alpha = 1 or survives even at alpha = 0.
inline AlphaC find_alpha_c(const BipartiteNetwork& net, int shock, double c,
                           double collapse_threshold = 0.5, double tol = 1e-3,
                           int max_steps = -1) {
    if (!(collapse_threshold > 0.0 && collapse_threshold <= 1.0))
        throw std::invalid_argument("find_alpha_c: collapse_threshold outside (0,1]");
    if (!(tol > 0.0)) throw std::invalid_argument("find_alpha_c: tol must be positive");
    auto collapses = [&](double alpha) {
        return run_cascade(net, shock, alpha, c, max_steps).final_failed_fraction >=
               collapse_threshold;
    };
    if (collapses(1.0)) return {AlphaC::always_collapses, 1.0};
    if (!collapses(0.0)) return {AlphaC::never_collapses, 0.0};
    double lo = 0.0, hi = 1.0;  // collapse at lo, stable at hi
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (collapses(mid))
            lo = mid;
        else
            hi = mid;
    }
    return {AlphaC::value, 0.5 * (lo + hi)};
}

// P_D: fraction of single-stock shocks for which a stock meets the
// driving-node criterion |simplified alpha_ci - (1-c)| <= equality_tol.
// With the default tol of 0 this is exactly the full-nestedness test.
inline std::vector<double> driving_node_probability(const BipartiteNetwork& net, double c,
                                                    double equality_tol = 0.0) {
    const int n = static_cast<int>(net.num_stocks());
    std::vector<int> count(n, 0);
    std::vector<char> holds_shock(net.num_investors(), 0);
    std::vector<char> seen(n, 0);
    for (int shock = 0; shock < n; ++shock) {
        for (int e : net.stock_edges(shock)) holds_shock[net.edges()[e].investor] = 1;
        // Projection neighbors of the shock, via its holders' portfolios.
        std::vector<int> neighbors;
        for (int e : net.stock_edges(shock)) {
            int m = net.edges()[e].investor;
            for (int e2 : net.investor_edges(m)) {
                int i = net.edges()[e2].stock;
                if (i != shock && !seen[i]) {
                    seen[i] = 1;
                    neighbors.push_back(i);
                }
            }
        }
        for (int i : neighbors) {
            seen[i] = 0;
            double outside = 0.0, inside = 0.0;
            for (int e : net.stock_edges(i)) {
                if (holds_shock[net.edges()[e].investor])
                    inside += net.edges()[e].weight;
                else
                    outside += net.edges()[e].weight;
            }
            double v;
            if (outside == 0.0) {
                v = 1.0 - c;
            } else if (inside == 0.0) {
                continue;  // indeterminate
            } else {
                v = ((1.0 - c) * net.stock_value(i) - outside) / inside;
                if (v < 0.0) v = 0.0;
            }
            if (std::fabs(v - (1.0 - c)) <= equality_tol) ++count[i];
        }
        for (int e : net.stock_edges(shock)) holds_shock[net.edges()[e].investor] = 0;
    }
    std::vector<double> p_d(n, 0.0);
    for (int i = 0; i < n; ++i) p_d[i] = static_cast<double>(count[i]) / n;
    return p_d;
}

struct MaxAlphaCiHistogram {
    std::vector<double> max_per_shock;  // NaN when the shock has no neighbor
    std::vector<std::size_t> bin_counts;
    double bin_lo = 0.0;
    double bin_hi = 1.0;
    double fraction_at_boundary = 0.0;  // shocks whose max equals 1-c within tol
};

// Per shocked stock, the maximum simplified alpha_ci over its projection
// neighbors, binned over [0,1].
inline MaxAlphaCiHistogram max_alpha_ci_histogram(const BipartiteNetwork& net, double c,
                                                  int bins = 9, double boundary_tol = 1e-9) {
    const int n = static_cast<int>(net.num_stocks());
    MaxAlphaCiHistogram out;
    out.max_per_shock.assign(n, std::numeric_limits<double>::quiet_NaN());
    out.bin_counts.assign(bins, 0);
    StockGraph proj = stock_projection(net);
    std::size_t with_neighbors = 0, at_boundary = 0;
    for (int shock = 0; shock < n; ++shock) {
        double best = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (int i : proj.neighbors(shock)) {
            AlphaCi a = neighbor_alpha_c_simplified(net, shock, i, c);
            if (a.flag == AlphaCiFlag::indeterminate) continue;
            any = true;
            if (a.value > best) best = a.value;
        }
        if (!any) continue;
        ++with_neighbors;
        out.max_per_shock[shock] = best;
        double clamped = std::min(std::max(best, 0.0), 1.0);
        int bin = std::min(static_cast<int>(clamped * bins), bins - 1);
        ++out.bin_counts[bin];
        if (std::fabs(best - (1.0 - c)) <= boundary_tol) ++at_boundary;
    }
    if (with_neighbors > 0)
        out.fraction_at_boundary = static_cast<double>(at_boundary) / with_neighbors;
    return out;
}

struct AverageCascadeSteps {
    std::vector<double> tau_bar;  // NaN for stocks that never fail under any other shock
    std::size_t never_failed = 0;
    Correlation correlation_with_pd;
};

// Mean failure step per stock over all single shocks in which it fails
// (shocking the stock itself is excluded), plus the Pearson correlation of
// tau_bar against P_D over the stocks where tau_bar is defined.
inline AverageCascadeSteps average_cascade_steps(const BipartiteNetwork& net, double c,
                                                 double alpha, const std::vector<double>& p_d,
                                                 int max_steps = -1) {
    const int n = static_cast<int>(net.num_stocks());
    std::vector<double> sum(n, 0.0);
    std::vector<int> times(n, 0);
    for (int shock = 0; shock < n; ++shock) {
        CascadeResult r = run_cascade(net, shock, alpha, c, max_steps);
        for (std::size_t tau = 1; tau < r.timeline.size(); ++tau) {
            for (int i : r.timeline[tau]) {
                sum[i] += static_cast<double>(tau);
                ++times[i];
            }
        }
    }
    AverageCascadeSteps out;
    out.tau_bar.assign(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> xs, ys;
    for (int i = 0; i < n; ++i) {
        if (times[i] == 0) {
            ++out.never_failed;
            continue;
        }
        out.tau_bar[i] = sum[i] / times[i];
        if (i < static_cast<int>(p_d.size())) {
            xs.push_back(out.tau_bar[i]);
            ys.push_back(p_d[i]);
        }
    }
    out.correlation_with_pd = pearson(xs, ys);
    return out;
}

}  // namespace stockcascade

#endif  // STOCKCASCADE_CRITICAL_HPP
