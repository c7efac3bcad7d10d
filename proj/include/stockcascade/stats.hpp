#ifndef STOCKCASCADE_STATS_HPP
#define STOCKCASCADE_STATS_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace stockcascade {

struct Correlation {
    double r = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    bool defined = false;  // false when n < 3 or either side has zero variance
};

inline Correlation pearson(const std::vector<double>& x, const std::vector<double>& y) {
    Correlation out;
    out.n = x.size();
    if (x.size() != y.size() || x.size() < 3) return out;
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return out;
    out.r = sxy / std::sqrt(sxx * syy);
    out.defined = true;
    if (out.r >= 1.0 || out.r <= -1.0) {
        out.p_value = 0.0;
        return out;
    }
    double t = out.r * std::sqrt((n - 2.0) / (1.0 - out.r * out.r));
    boost::math::students_t dist(n - 2.0);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
    return out;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
    bool defined = false;
};

// Ordinary least squares y = slope * x + intercept.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit out;
    out.n = x.size();
    if (x.size() != y.size() || x.size() < 2) return out;
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) return out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    out.defined = true;
    return out;
}

}  // namespace stockcascade

#endif  // STOCKCASCADE_STATS_HPP
