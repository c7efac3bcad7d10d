#ifndef STOCKCASCADE_CSV_HPP
#define STOCKCASCADE_CSV_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "stockcascade/network.hpp"
#include "stockcascade/waves.hpp"

namespace stockcascade {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace and CR
        std::size_t a = field.find_first_not_of(" \t\r");
        std::size_t b = field.find_last_not_of(" \t\r");
        fields.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

// Reads `investor_id,stock_id,market_value`. Unparseable values become
// records with a NaN value, which load_holdings rejects with the line number.
inline std::vector<HoldingRecord> read_holdings_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open holdings file: " + path);
    std::vector<HoldingRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;  // header
        auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw std::runtime_error("holdings line " + std::to_string(line_no) +
                                     ": expected 3 fields");
        HoldingRecord rec;
        rec.investor_id = fields[0];
        rec.stock_id = fields[1];
        rec.line = line_no;
        try {
            std::size_t used = 0;
            rec.market_value = std::stod(fields[2], &used);
            if (used != fields[2].size()) rec.market_value = std::nan("");
        } catch (const std::exception&) {
            rec.market_value = std::nan("");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

// Reads `fund_id,company_id`.
inline std::unordered_map<std::string, std::string> read_mapping_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mapping file: " + path);
    std::unordered_map<std::string, std::string> mapping;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw std::runtime_error("mapping line " + std::to_string(line_no) +
                                     ": expected 2 fields");
        mapping[fields[0]] = fields[1];
    }
    return mapping;
}

// Reads `timestamp,stock_id` with timestamp `YYYY-MM-DD HH:MM`.
inline std::vector<FailureEvent> read_events_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open events file: " + path);
    std::vector<FailureEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw std::runtime_error("events line " + std::to_string(line_no) +
                                     ": expected 2 fields");
        events.push_back(parse_failure_event(fields[0], fields[1]));
    }
    return events;
}

// Fixed-format double for CSV output: stable across runs and thread counts.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

}  // namespace stockcascade

#endif  // STOCKCASCADE_CSV_HPP
