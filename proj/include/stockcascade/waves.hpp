#ifndef STOCKCASCADE_WAVES_HPP
#define STOCKCASCADE_WAVES_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "stockcascade/stats.hpp"

namespace stockcascade {

// One limit-down event: the first minute a stock touched its limit price.
struct FailureEvent {
    std::string day;        // "YYYY-MM-DD"
    int minute_of_day = 0;  // minutes since midnight
    std::string stock_id;
};

struct TradingSession {
    int start_minute;  // inclusive
    int end_minute;    // inclusive
};

inline std::vector<TradingSession> default_sessions() {
    return {{9 * 60 + 30, 11 * 60 + 30}, {13 * 60, 15 * 60}};
}

// Parses "YYYY-MM-DD HH:MM". Throws on malformed input.
inline FailureEvent parse_failure_event(const std::string& timestamp, const std::string& stock_id) {
    int year, month, day, hour, minute;
    char sep;
    if (std::sscanf(timestamp.c_str(), "%d-%d-%d%c%d:%d", &year, &month, &day, &sep, &hour,
                    &minute) != 6 ||
        hour < 0 || hour > 23 || minute < 0 || minute > 59 || month < 1 || month > 12 || day < 1 ||
        day > 31)
        throw std::invalid_argument("bad timestamp: " + timestamp);
    FailureEvent ev;
    ev.day = timestamp.substr(0, 10);
    ev.minute_of_day = hour * 60 + minute;
    ev.stock_id = stock_id;
    return ev;
}

struct Wave {
    std::string day;
    int session = 0;           // index into the session list
    int start_minute = 0;      // inclusive, minutes since midnight
    int end_minute = 0;        // inclusive
    std::vector<int> counts;   // failures per minute over [start, end]
    std::vector<int> peak_minutes;  // minutes attaining the wave maximum
    int peak_minute = 0;       // earliest maximal minute

    int count_at(int minute) const { return counts[minute - start_minute]; }
};

// Groups events into waves: maximal runs of failure minutes within one
// (day, session), allowing internal silent gaps of at most gap_tolerance
// minutes. The lunch break (session boundary) always splits waves. Events
// outside every declared session are dropped and counted. Invariant to
// event input order.
inline std::vector<Wave> detect_waves(const std::vector<FailureEvent>& events, int gap_tolerance = 0,
                                      const std::vector<TradingSession>& sessions = default_sessions(),
                                      std::size_t* out_of_session_count = nullptr) {
    if (gap_tolerance < 0) throw std::invalid_argument("detect_waves: negative gap_tolerance");
    std::size_t dropped = 0;
    // (day, session) -> minute -> count
    std::map<std::pair<std::string, int>, std::map<int, int>> grouped;
    for (const auto& ev : events) {
        int session = -1;
        for (std::size_t s = 0; s < sessions.size(); ++s) {
            if (ev.minute_of_day >= sessions[s].start_minute &&
                ev.minute_of_day <= sessions[s].end_minute) {
                session = static_cast<int>(s);
                break;
            }
        }
        if (session < 0) {
            ++dropped;
            continue;
        }
        ++grouped[{ev.day, session}][ev.minute_of_day];
    }
    if (out_of_session_count) *out_of_session_count = dropped;

    std::vector<Wave> waves;
    for (const auto& [key, minutes] : grouped) {
        int run_start = -1, prev = -1;
        auto flush = [&](int run_end) {
            Wave w;
            w.day = key.first;
            w.session = key.second;
            w.start_minute = run_start;
            w.end_minute = run_end;
            w.counts.assign(run_end - run_start + 1, 0);
            int best = 0;
            for (auto it = minutes.lower_bound(run_start); it != minutes.end() && it->first <= run_end;
                 ++it) {
                w.counts[it->first - run_start] = it->second;
                best = std::max(best, it->second);
            }
            for (int m = run_start; m <= run_end; ++m)
                if (w.counts[m - run_start] == best) w.peak_minutes.push_back(m);
            w.peak_minute = w.peak_minutes.front();
            waves.push_back(std::move(w));
        };
        for (const auto& [minute, count] : minutes) {
            if (run_start < 0) {
                run_start = minute;
            } else if (minute - prev > gap_tolerance + 1) {
                flush(prev);
                run_start = minute;
            }
            prev = minute;
        }
        if (run_start >= 0) flush(prev);
    }
    return waves;
}

struct MinutePoint {
    std::string day;
    int minute = 0;
    int distance_to_peak = 0;  // minute - peak minute of the enclosing wave
    double max_pd = 0.0;
    int failures = 0;
};

struct MaxPdTimeline {
    std::vector<MinutePoint> points;
    Correlation pre_peak;   // over minutes strictly before the peak
    Correlation post_peak;  // over minutes strictly after the peak
    std::size_t missing_pd = 0;  // events whose stock has no P_D entry
};

// Per failure minute, the maximum P_D among that minute's failed stocks,
// with the signed distance to the enclosing wave's (earliest) peak minute.
// Correlations are Pearson on (distance, max P_D), pooled over waves,
// computed separately for the pre- and post-peak sides.
inline MaxPdTimeline max_pd_timeline(const std::vector<FailureEvent>& events,
                                     const std::unordered_map<std::string, double>& p_d,
                                     const std::vector<Wave>& waves) {
    MaxPdTimeline out;
    // (day, minute) -> max P_D and failure count
    std::map<std::pair<std::string, int>, std::pair<double, int>> per_minute;
    for (const auto& ev : events) {
        auto it = p_d.find(ev.stock_id);
        auto& slot = per_minute[{ev.day, ev.minute_of_day}];
        ++slot.second;
        if (it == p_d.end()) {
            ++out.missing_pd;
            continue;
        }
        slot.first = std::max(slot.first, it->second);
    }
    std::vector<double> pre_x, pre_y, post_x, post_y;
    for (const auto& w : waves) {
        for (int m = w.start_minute; m <= w.end_minute; ++m) {
            auto it = per_minute.find({w.day, m});
            if (it == per_minute.end()) continue;
            MinutePoint pt;
            pt.day = w.day;
            pt.minute = m;
            pt.distance_to_peak = m - w.peak_minute;
            pt.max_pd = it->second.first;
            pt.failures = it->second.second;
            if (pt.distance_to_peak < 0) {
                pre_x.push_back(pt.distance_to_peak);
                pre_y.push_back(pt.max_pd);
            } else if (pt.distance_to_peak > 0) {
                post_x.push_back(pt.distance_to_peak);
                post_y.push_back(pt.max_pd);
            }
            out.points.push_back(std::move(pt));
        }
    }
    out.pre_peak = pearson(pre_x, pre_y);
    out.post_peak = pearson(post_x, post_y);
    return out;
}

struct BucketSummary {
    int bucket = 0;
    std::size_t count = 0;
    double mean = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

// Per-bucket distribution of the k-core index of failing stocks. Buckets are
// cascade steps or time intervals, depending on the caller. Empty buckets
// are skipped.
inline std::vector<BucketSummary> kcore_trajectory(const std::vector<std::pair<int, int>>& bucket_kcore) {
    std::map<int, std::vector<double>> grouped;
    for (const auto& [bucket, kc] : bucket_kcore) grouped[bucket].push_back(kc);
    std::vector<BucketSummary> out;
    for (auto& [bucket, values] : grouped) {
        std::sort(values.begin(), values.end());
        BucketSummary s;
        s.bucket = bucket;
        s.count = values.size();
        double sum = 0.0;
        for (double v : values) sum += v;
        s.mean = sum / values.size();
        auto quantile = [&](double q) {
            double pos = q * (values.size() - 1);
            std::size_t lo = static_cast<std::size_t>(pos);
            std::size_t hi = std::min(lo + 1, values.size() - 1);
            double frac = pos - lo;
            return values[lo] * (1.0 - frac) + values[hi] * frac;
        };
        s.q1 = quantile(0.25);
        s.median = quantile(0.5);
        s.q3 = quantile(0.75);
        out.push_back(s);
    }
    return out;
}

}  // namespace stockcascade

#endif  // STOCKCASCADE_WAVES_HPP
