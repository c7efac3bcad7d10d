// Command-line front end: loads holdings/mapping/events CSVs and runs the
// sweep, metrics, randomize, waves, and cascade commands, writing CSV tables
// plus a JSON run manifest into the output directory.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stockcascade/cascade.hpp"
#include "stockcascade/critical.hpp"
#include "stockcascade/csv.hpp"
#include "stockcascade/metrics.hpp"
#include "stockcascade/network.hpp"
#include "stockcascade/parallel.hpp"
#include "stockcascade/randomize.hpp"
#include "stockcascade/sweep.hpp"
#include "stockcascade/waves.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace stockcascade;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
    std::string holdings;
    std::string mapping;
    std::string events;
    std::string out_dir = "out";
    std::string c_grid = "0.1:0.9:0.1";
    std::string alpha_grid;
    std::string p_list = "0,0.2,0.4,0.6,0.8,1";
    double collapse_threshold = 0.5;
    double tol = 1e-3;
    int max_steps = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 600;
    int threads = 1;
    int gap_tolerance = 0;
    std::string kcore_graph = "projection";
    std::string shock;  // cascade subcommand
    double alpha = 1.0;
    double c = 0.1;
    std::vector<std::string> sessions = {"09:30-11:30", "13:00-15:00"};
};

std::vector<double> parse_grid(const std::string& spec) {
    double lo, hi, step;
    char c1, c2;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
        throw std::runtime_error("bad grid spec (want lo:hi:step): " + spec);
    std::vector<double> grid;
    for (double v = lo; v <= hi + 1e-9; v += step) grid.push_back(v);
    return grid;
}

std::vector<double> parse_list(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

int parse_minute(const std::string& hhmm) {
    int h, m;
    if (std::sscanf(hhmm.c_str(), "%d:%d", &h, &m) != 2)
        throw std::runtime_error("bad session time: " + hhmm);
    return h * 60 + m;
}

std::vector<TradingSession> parse_sessions(const std::vector<std::string>& specs) {
    std::vector<TradingSession> sessions;
    for (const auto& s : specs) {
        auto dash = s.find('-');
        if (dash == std::string::npos) throw std::runtime_error("bad session spec: " + s);
        sessions.push_back({parse_minute(s.substr(0, dash)), parse_minute(s.substr(dash + 1))});
    }
    return sessions;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_manifest(const RunConfig& cfg, const std::string& command, const json& extra) {
    json manifest;
    manifest["tool"] = "stockcascade";
    manifest["version"] = kVersion;
    manifest["command"] = command;
    json config;
    config["c_grid"] = cfg.c_grid;
    config["alpha_grid"] = cfg.alpha_grid;
    config["collapse_threshold"] = cfg.collapse_threshold;
    config["tol"] = cfg.tol;
    config["max_steps"] = cfg.max_steps;
    config["trials"] = cfg.trials;
    config["threads"] = cfg.threads;
    config["p_list"] = cfg.p_list;
    config["gap_tolerance"] = cfg.gap_tolerance;
    config["kcore_graph"] = cfg.kcore_graph;
    config["sessions"] = cfg.sessions;
    if (cfg.seed_set) config["seed"] = cfg.seed;
    manifest["config"] = config;
    json inputs = json::object();
    for (const auto& [name, path] :
         {std::pair{"holdings", cfg.holdings}, {"mapping", cfg.mapping}, {"events", cfg.events}}) {
        if (path.empty()) continue;
        inputs[name] = {{"path", path}, {"fnv1a64", hex64(fnv1a64_file(path))}};
    }
    manifest["inputs"] = inputs;
    manifest.update(extra);
    std::ofstream out(fs::path(cfg.out_dir) / "manifest.json");
    out << manifest.dump(2) << "\n";
}

BipartiteNetwork load_network(const RunConfig& cfg, json& report) {
    if (cfg.holdings.empty()) throw std::runtime_error("--holdings is required");
    auto records = read_holdings_csv(cfg.holdings);
    std::size_t unmapped = 0;
    if (!cfg.mapping.empty()) {
        auto grouped = group_by_mapping(records, read_mapping_csv(cfg.mapping));
        unmapped = grouped.unmapped_funds;
        records = std::move(grouped.records);
    }
    auto loaded = load_holdings(records);
    for (const auto& rej : loaded.rejected)
        std::cerr << "warning: rejected holdings line " << rej.line << ": " << rej.reason << "\n";
    report["stocks"] = loaded.net.num_stocks();
    report["investors"] = loaded.net.num_investors();
    report["edges"] = loaded.net.num_edges();
    report["rejected_records"] = loaded.rejected.size();
    report["merged_duplicates"] = loaded.merged_duplicates;
    report["unmapped_funds"] = unmapped;
    std::cerr << "loaded " << loaded.net.num_stocks() << " stocks, " << loaded.net.num_investors()
              << " investors, " << loaded.net.num_edges() << " edges\n";
    return loaded.net;
}

// Bipartite k-core peeling, offered behind --kcore-graph bipartite: degrees
// are bipartite degrees, stocks and investors peel together; the reported
// index is the stock's.
std::vector<int> bipartite_k_core(const BipartiteNetwork& net) {
    const int n_stocks = static_cast<int>(net.num_stocks());
    const int n = n_stocks + static_cast<int>(net.num_investors());
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : net.edges()) {
        adj[e.stock].push_back(n_stocks + e.investor);
        adj[n_stocks + e.investor].push_back(e.stock);
    }
    auto core = k_core_index(StockGraph(std::move(adj)));
    core.resize(n_stocks);
    return core;
}

void cmd_sweep(const RunConfig& cfg) {
    json report;
    auto net = load_network(cfg, report);
    auto c_grid = parse_grid(cfg.c_grid);
    std::vector<double> alpha_grid;
    if (!cfg.alpha_grid.empty()) alpha_grid = parse_grid(cfg.alpha_grid);
    auto sweep = run_sweep(net, c_grid, alpha_grid, cfg.collapse_threshold, cfg.tol, cfg.max_steps,
                           cfg.threads);

    if (!alpha_grid.empty()) {
        CsvWriter grid(fs::path(cfg.out_dir) / "sweep_grid.csv");
        grid.row({"c", "alpha", "shock_id", "failed_fraction", "collapsed"});
        for (const auto& cell : sweep.grid)
            grid.row({format_double(cell.c), format_double(cell.alpha), net.stock_ids()[cell.shock],
                      format_double(cell.failed_fraction), cell.collapsed ? "1" : "0"});
    }
    {
        CsvWriter per_shock(fs::path(cfg.out_dir) / "alpha_c_per_shock.csv");
        per_shock.row({"c", "shock_id", "alpha_c", "status"});
        for (const auto& row : sweep.alpha_c_per_shock) {
            std::string status = row.alpha_c.kind == AlphaC::value ? "ok"
                                 : row.alpha_c.kind == AlphaC::never_collapses ? "never-collapses"
                                                                               : "always-collapses";
            per_shock.row({format_double(row.c), net.stock_ids()[row.shock],
                           row.alpha_c.is_value() ? format_double(row.alpha_c.alpha_c) : "",
                           status});
        }
    }
    {
        CsvWriter agg(fs::path(cfg.out_dir) / "alpha_c_aggregate.csv");
        agg.row({"c", "mean_alpha_c", "max_alpha_c", "n_values", "n_sentinels"});
        for (const auto& row : sweep.aggregate)
            agg.row({format_double(row.c), format_double(row.mean_alpha_c),
                     format_double(row.max_alpha_c), std::to_string(row.n_values),
                     std::to_string(row.n_sentinels)});
    }
    write_manifest(cfg, "sweep", {{"load", report}});
}

void cmd_metrics(const RunConfig& cfg) {
    json report;
    auto net = load_network(cfg, report);
    auto proj = stock_projection(net);
    auto core = cfg.kcore_graph == "bipartite" ? bipartite_k_core(net) : k_core_index(proj);
    auto p_d = driving_node_probability(net, cfg.c);
    auto rows = metrics_table(net, proj, core, p_d);
    CsvWriter out(fs::path(cfg.out_dir) / "metrics.csv");
    out.row({"stock_id", "degree", "branching", "avg_nestedness", "k_core", "p_d"});
    for (const auto& r : rows)
        out.row({r.stock_id, std::to_string(r.degree), format_double(r.branching),
                 std::isnan(r.avg_nestedness) ? "" : format_double(r.avg_nestedness),
                 std::to_string(r.k_core), format_double(r.p_d)});
    {
        CsvWriter knn_out(fs::path(cfg.out_dir) / "knn_degree.csv");
        knn_out.row({"side", "degree", "mean_neighbor_degree"});
        auto knn = knn_degree(net);
        for (const auto& [k, v] : knn.stocks)
            knn_out.row({"stock", std::to_string(k), format_double(v)});
        for (const auto& [k, v] : knn.investors)
            knn_out.row({"investor", std::to_string(k), format_double(v)});
    }
    write_manifest(cfg, "metrics", {{"load", report}, {"c", cfg.c}});
}

void cmd_randomize(const RunConfig& cfg) {
    if (!cfg.seed_set) throw std::runtime_error("randomize requires --seed");
    json report;
    auto net = load_network(cfg, report);
    auto result = randomization_experiment(net, parse_list(cfg.p_list), cfg.trials,
                                           parse_grid(cfg.c_grid), cfg.collapse_threshold, cfg.tol,
                                           cfg.seed, cfg.threads);
    {
        CsvWriter points(fs::path(cfg.out_dir) / "randomize_alpha_c.csv");
        points.row({"p", "c", "mean_alpha_c", "n_excluded"});
        for (const auto& pt : result.points)
            points.row({format_double(pt.p), format_double(pt.c), format_double(pt.mean_alpha_c),
                        std::to_string(pt.n_excluded)});
    }
    {
        CsvWriter fits(fs::path(cfg.out_dir) / "randomize_fit.csv");
        fits.row({"p", "slope", "intercept", "r2"});
        for (const auto& f : result.fits)
            fits.row({format_double(f.p), format_double(f.fit.slope),
                      format_double(f.fit.intercept), format_double(f.fit.r2)});
    }
    write_manifest(cfg, "randomize", {{"load", report}});
}

void cmd_waves(const RunConfig& cfg) {
    if (cfg.events.empty()) throw std::runtime_error("--events is required");
    auto events = read_events_csv(cfg.events);
    auto sessions = parse_sessions(cfg.sessions);
    std::size_t dropped = 0;
    auto waves = detect_waves(events, cfg.gap_tolerance, sessions, &dropped);
    {
        CsvWriter out(fs::path(cfg.out_dir) / "waves.csv");
        out.row({"day", "session", "start_minute", "end_minute", "peak_minute", "total_failures"});
        for (const auto& w : waves) {
            int total = 0;
            for (int c : w.counts) total += c;
            out.row({w.day, std::to_string(w.session), std::to_string(w.start_minute),
                     std::to_string(w.end_minute), std::to_string(w.peak_minute),
                     std::to_string(total)});
        }
    }

    json extra = {{"waves", waves.size()}, {"out_of_session_events", dropped}};

    // P_D and k-core relate real failure timing to model structure; both need
    // the holdings network.
    if (!cfg.holdings.empty()) {
        json report;
        auto net = load_network(cfg, report);
        auto p_d_vec = driving_node_probability(net, cfg.c);
        std::unordered_map<std::string, double> p_d;
        for (std::size_t i = 0; i < net.num_stocks(); ++i) p_d[net.stock_ids()[i]] = p_d_vec[i];
        auto timeline = max_pd_timeline(events, p_d, waves);
        {
            CsvWriter out(fs::path(cfg.out_dir) / "max_pd_timeline.csv");
            out.row({"day", "minute", "distance_to_peak", "max_pd", "failures"});
            for (const auto& pt : timeline.points)
                out.row({pt.day, std::to_string(pt.minute), std::to_string(pt.distance_to_peak),
                         format_double(pt.max_pd), std::to_string(pt.failures)});
        }
        auto corr_json = [](const Correlation& c) {
            return json{{"defined", c.defined}, {"r", c.r}, {"p_value", c.p_value}, {"n", c.n}};
        };
        extra["pre_peak"] = corr_json(timeline.pre_peak);
        extra["post_peak"] = corr_json(timeline.post_peak);
        extra["missing_pd"] = timeline.missing_pd;
        extra["load"] = report;

        auto proj = stock_projection(net);
        auto core = cfg.kcore_graph == "bipartite" ? bipartite_k_core(net) : k_core_index(proj);
        std::vector<std::pair<int, int>> bucket_kcore;
        for (const auto& ev : events) {
            int idx = net.stock_index(ev.stock_id);
            if (idx >= 0) bucket_kcore.push_back({ev.minute_of_day, core[idx]});
        }
        auto trajectory = kcore_trajectory(bucket_kcore);
        CsvWriter out(fs::path(cfg.out_dir) / "kcore_trajectory.csv");
        out.row({"minute", "count", "mean_kcore", "q1", "median", "q3"});
        for (const auto& b : trajectory)
            out.row({std::to_string(b.bucket), std::to_string(b.count), format_double(b.mean),
                     format_double(b.q1), format_double(b.median), format_double(b.q3)});
    }
    write_manifest(cfg, "waves", extra);
}

void cmd_cascade(const RunConfig& cfg) {
    json report;
    auto net = load_network(cfg, report);
    if (cfg.shock.empty()) throw std::runtime_error("cascade requires --shock");
    int shock = net.stock_index(cfg.shock);
    if (shock < 0) throw std::runtime_error("unknown stock: " + cfg.shock);
    auto r = run_cascade(net, shock, cfg.alpha, cfg.c, cfg.max_steps);
    CsvWriter out(fs::path(cfg.out_dir) / "cascade_timeline.csv");
    out.row({"tau", "stock_id"});
    for (std::size_t tau = 0; tau < r.timeline.size(); ++tau)
        for (int i : r.timeline[tau]) out.row({std::to_string(tau), net.stock_ids()[i]});
    write_manifest(cfg, "cascade",
                   {{"load", report},
                    {"alpha", cfg.alpha},
                    {"c", cfg.c},
                    {"failed_fraction", r.final_failed_fraction},
                    {"steps", r.steps},
                    {"truncated", r.truncated},
                    {"surviving_market_value", r.surviving_market_value}});
    std::cout << "failed fraction " << r.final_failed_fraction << " in " << r.steps << " steps\n";
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("holdings", cfg.holdings);
    get("mapping", cfg.mapping);
    get("events", cfg.events);
    get("out_dir", cfg.out_dir);
    get("c_grid", cfg.c_grid);
    get("alpha_grid", cfg.alpha_grid);
    get("p_list", cfg.p_list);
    get("collapse_threshold", cfg.collapse_threshold);
    get("tol", cfg.tol);
    get("max_steps", cfg.max_steps);
    get("trials", cfg.trials);
    get("threads", cfg.threads);
    get("gap_tolerance", cfg.gap_tolerance);
    get("kcore_graph", cfg.kcore_graph);
    get("alpha", cfg.alpha);
    get("c", cfg.c);
    get("sessions", cfg.sessions);
    if (j.contains("seed")) {
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.seed_set = true;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"price-limit cascade contagion toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    // Shared options; command-line flags override config-file values because
    // CLI11 parses them after the config callback runs.
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path)->check(CLI::ExistingFile);
        cmd->add_option("--holdings", cfg.holdings);
        cmd->add_option("--mapping", cfg.mapping);
        cmd->add_option("--events", cfg.events);
        cmd->add_option("--out-dir", cfg.out_dir);
        cmd->add_option("--c-grid", cfg.c_grid);
        cmd->add_option("--alpha-grid", cfg.alpha_grid);
        cmd->add_option("--collapse-threshold", cfg.collapse_threshold);
        cmd->add_option("--tol", cfg.tol);
        cmd->add_option("--max-steps", cfg.max_steps);
        cmd->add_option("--seed", cfg.seed)->each([&](const std::string&) { cfg.seed_set = true; });
        cmd->add_option("--trials", cfg.trials);
        cmd->add_option("--p-list", cfg.p_list);
        cmd->add_option("--threads", cfg.threads);
        cmd->add_option("--gap-tolerance", cfg.gap_tolerance);
        cmd->add_option("--session", cfg.sessions);
        cmd->add_option("--kcore-graph", cfg.kcore_graph)
            ->check(CLI::IsMember({"projection", "bipartite"}));
        cmd->add_option("--alpha", cfg.alpha);
        cmd->add_option("--c", cfg.c);
    };

    auto* sweep = app.add_subcommand("sweep", "phase sweep and critical confidence per c");
    auto* metrics = app.add_subcommand("metrics", "structural metrics and P_D table");
    auto* randomize = app.add_subcommand("randomize", "partial rewiring experiment");
    auto* waves = app.add_subcommand("waves", "wave and peak analysis of limit-down events");
    auto* cascade = app.add_subcommand("cascade", "single cascade with full timeline dump");
    for (auto* cmd : {sweep, metrics, randomize, waves, cascade}) add_common(cmd);
    cascade->add_option("--shock", cfg.shock);

    // Config file must be applied before flag values land, so pre-scan it.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                apply_config_file(cfg, argv[i + 1]);
            } catch (const std::exception& ex) {
                std::cerr << "error: " << ex.what() << "\n";
                return 1;
            }
        }
    }

    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(cfg.out_dir);
        if (sweep->parsed()) cmd_sweep(cfg);
        if (metrics->parsed()) cmd_metrics(cfg);
        if (randomize->parsed()) cmd_randomize(cfg);
        if (waves->parsed()) cmd_waves(cfg);
        if (cascade->parsed()) cmd_cascade(cfg);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
