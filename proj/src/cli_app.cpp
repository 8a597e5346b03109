#include "wfsel/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wfsel/changepoint.hpp"
#include "wfsel/corpus.hpp"
#include "wfsel/inference.hpp"
#include "wfsel/rng.hpp"
#include "wfsel/stats.hpp"

using nlohmann::json;

namespace wfsel::cli {

namespace {

constexpr int kSchemaVersion = 1;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << text;
}

std::string format_json(const json& doc) { return doc.dump(2) + "\n"; }

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ','))
        if (!field.empty()) out.push_back(std::stod(field));
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_double_list(text)) out.push_back(static_cast<int>(std::llround(v)));
    return out;
}

// "t:s,t:s" selection schedule; each s applies from generation t onward.
std::vector<std::pair<int, double>> parse_schedule(const std::string& text) {
    std::vector<std::pair<int, double>> sched;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        size_t colon = field.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("bad schedule entry (want t:s): " + field);
        sched.emplace_back(std::stoi(field.substr(0, colon)),
                           std::stod(field.substr(colon + 1)));
    }
    std::sort(sched.begin(), sched.end());
    if (sched.empty() || sched.front().first != 0)
        throw std::runtime_error("schedule must start at generation 0");
    return sched;
}

json params_json(const WfParams& p) {
    return json{{"popsize", p.popsize}, {"selstrength", p.selstrength}};
}

json fit_result_json(const std::string& label, std::optional<int> bin_width,
                     const FitResult& r) {
    json j{{"label", label},
           {"n_drift", r.drift_fit.popsize},
           {"n_sel", r.sel_fit.popsize},
           {"s", r.sel_fit.selstrength},
           {"loglik_drift", r.loglik_drift},
           {"loglik_sel", r.loglik_sel},
           {"lambda", r.lambda},
           {"generation_time", r.generation_time},
           {"replicates", r.replicates},
           {"replicates_used", r.replicates_used},
           {"replicates_failed", r.replicates_failed},
           {"exceed_count", r.exceed_count},
           {"seed", r.seed},
           {"converged", r.converged}};
    if (bin_width) j["bin_width"] = *bin_width;
    if (r.p_value) j["p_value"] = *r.p_value;
    return j;
}

json node_json(const ChangePointNode& n) {
    json j{{"t_begin", n.t_begin},
           {"t_end", n.t_end},
           {"n_points", n.n_points},
           {"const_fit", params_json(n.const_params)},
           {"loglik_const", n.loglik_const},
           {"significant", n.significant}};
    if (n.split) {
        j["split_time"] = n.split->split_time;
        j["before"] = params_json(n.split->before);
        j["after"] = params_json(n.split->after);
        j["loglik_split"] = n.split->loglik();
        j["lambda_split"] = n.lambda_split;
    }
    if (n.p_value) {
        j["p_value"] = *n.p_value;
        j["exceed_count"] = n.exceed_count;
        j["p_zero_form"] = n.replicates_used > 0
                               ? static_cast<double>(n.exceed_count) / n.replicates_used
                               : 1.0;
        j["replicates_used"] = n.replicates_used;
        j["replicates_failed"] = n.replicates_failed;
    }
    if (!n.children.empty())
        j["children"] = json::array({node_json(n.children[0]), node_json(n.children[1])});
    return j;
}

struct ItemErrors {
    json list = json::array();

    void add(const std::string& item, const std::string& message) {
        list.push_back({{"item", item}, {"message", message}});
        std::cerr << "error: " << item << ": " << message << "\n";
    }
    bool any() const { return !list.empty(); }
};

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    double popsize = 0.0;
    double sel = 0.0;
    std::string schedule;
    double x0 = 0.0;
    int generations = 0;
    int observe_every = 1;
    std::uint64_t seed = 0;
    std::string out;
};

int run_simulate(const SimulateOpts& o) {
    std::vector<std::pair<int, double>> sched =
        o.schedule.empty() ? std::vector<std::pair<int, double>>{{0, o.sel}}
                           : parse_schedule(o.schedule);
    if (o.observe_every < 1) throw std::runtime_error("--observe-every must be >= 1");

    std::vector<double> traj{o.x0};
    traj.reserve(o.generations + 1);
    double x = o.x0;
    for (size_t seg = 0; seg < sched.size(); ++seg) {
        int seg_end = seg + 1 < sched.size() ? std::min(sched[seg + 1].first, o.generations)
                                             : o.generations;
        int len = seg_end - sched[seg].first;
        if (len <= 0) continue;
        std::vector<double> part = simulate_trajectory(
            x, WfParams(o.popsize, sched[seg].second), len, derive_seed(o.seed, seg));
        traj.insert(traj.end(), part.begin() + 1, part.end());
        x = traj.back();
    }

    json config{{"command", "simulate"},        {"schema_version", kSchemaVersion},
                {"popsize", o.popsize},         {"x0", o.x0},
                {"generations", o.generations}, {"observe_every", o.observe_every},
                {"seed", o.seed}};
    if (o.schedule.empty())
        config["sel"] = o.sel;
    else
        config["sel_schedule"] = o.schedule;

    std::ostringstream body;
    body << "# config: " << config.dump() << "\n";
    body << "time,frequency\n";
    char buf[64];
    for (int t = 0; t < static_cast<int>(traj.size()); t += o.observe_every) {
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", t, traj[t]);
        body << buf;
    }
    write_text(o.out, body.str());
    return 0;
}

// --------------------------------------------------------------------- fit

struct FitOpts {
    std::vector<std::string> series;
    std::vector<std::string> counts;
    std::string bin_widths;
    int origin_year = std::numeric_limits<int>::min();
    long long min_tokens = kDefaultMinTokens;
    double generation_time = 0.0;
    int replicates = 1000;
    std::string bootstrap_init = "observed_start";
    bool equalize = false;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
};

struct FitItem {
    std::string label;
    std::optional<int> bin_width;
    TimeSeries series;
};

int run_fit(const FitOpts& o) {
    if (o.series.empty() == o.counts.empty())
        throw std::runtime_error("fit: pass exactly one of --series or --counts");
    if (o.bootstrap_init != "observed_start" && o.bootstrap_init != "uniform")
        throw std::runtime_error("fit: --bootstrap-init must be observed_start or uniform");
    BootstrapInit binit = o.bootstrap_init == "uniform" ? BootstrapInit::uniform
                                                        : BootstrapInit::observed_start;
    std::vector<int> widths =
        o.bin_widths.empty() ? std::vector<int>{} : parse_int_list(o.bin_widths);

    ItemErrors errors;
    std::vector<FitItem> items;
    for (const std::string& path : o.series) {
        try {
            FitItem item;
            item.series = read_series_csv(path);
            item.label = item.series.label;
            items.push_back(std::move(item));
        } catch (const std::exception& ex) {
            errors.add(path, ex.what());
        }
    }
    for (const std::string& path : o.counts) {
        try {
            VariantCounts counts = read_counts_csv(path);
            if (counts.rows.empty()) throw std::runtime_error("no rows");
            if (!usage_screen(counts))
                std::cerr << "note: " << counts.word
                          << " fails the 1% usage screen (no 5-year bin where both "
                             "variants exceed 1% of usage); fitting it anyway\n";
            int origin = o.origin_year;
            if (origin == std::numeric_limits<int>::min()) {
                origin = counts.rows.front().year;
                for (const auto& r : counts.rows) origin = std::min(origin, r.year);
            }
            std::vector<int> ws = widths.empty() ? std::vector<int>{1} : widths;
            for (int w : ws) {
                FitItem item;
                item.series = bin_counts(counts, BinSpec{w, origin}, o.min_tokens);
                item.label = counts.word;
                item.bin_width = w;
                items.push_back(std::move(item));
            }
        } catch (const std::exception& ex) {
            errors.add(path, ex.what());
        }
    }

    // One shared generation time keeps s and 1/N in the same units across
    // binnings; default to the smallest gap seen in any input.
    double shared_gen = o.generation_time;
    if (!(shared_gen > 0.0)) {
        shared_gen = std::numeric_limits<double>::infinity();
        for (const auto& item : items)
            if (item.series.size() >= 2)
                shared_gen = std::min(shared_gen, default_generation_time(item.series));
        if (!std::isfinite(shared_gen)) shared_gen = 1.0;
    }

    json results = json::array();
    int done = 0;
    for (auto& item : items) {
        std::string tag =
            item.label + (item.bin_width ? "@" + std::to_string(*item.bin_width) : "");
        std::cerr << "[" << ++done << "/" << items.size() << "] fit " << tag << "\n";
        try {
            TimeSeries working = item.series;
            if (o.equalize) working = equalize_sampling(working, derive_seed(o.seed, done));
            if (working.size() < 2) throw std::runtime_error("need at least 2 points");
            FitResult r = drift_p_value(working, shared_gen, o.replicates, o.seed, binit);
            results.push_back(fit_result_json(item.label, item.bin_width, r));
        } catch (const std::exception& ex) {
            errors.add(tag, ex.what());
        }
    }

    json config{{"command", "fit"},
                {"schema_version", kSchemaVersion},
                {"series", o.series},
                {"counts", o.counts},
                {"bin_widths", widths},
                {"min_tokens", o.min_tokens},
                {"generation_time", shared_gen},
                {"replicates", o.replicates},
                {"bootstrap_init", o.bootstrap_init},
                {"equalize", o.equalize},
                {"seed", o.seed}};

    if (o.format == "csv") {
        std::ostringstream body;
        body << "# config: " << config.dump() << "\n";
        body << "label,bin_width,n_drift,n_sel,s,lambda,p_value,replicates_used,seed\n";
        char buf[64];
        for (const auto& r : results) {
            body << r["label"].get<std::string>() << ',';
            if (r.contains("bin_width")) body << r["bin_width"].get<int>();
            auto num = [&](const char* key) {
                std::snprintf(buf, sizeof buf, "%.10g", r[key].get<double>());
                body << ',' << buf;
            };
            num("n_drift");
            num("n_sel");
            num("s");
            num("lambda");
            body << ',';
            if (r.contains("p_value")) {
                std::snprintf(buf, sizeof buf, "%.10g", r["p_value"].get<double>());
                body << buf;
            }
            body << ',' << r["replicates_used"].get<int>() << ','
                 << r["seed"].get<std::uint64_t>() << "\n";
        }
        write_text(o.out, body.str());
    } else {
        json doc{{"schema_version", kSchemaVersion},
                 {"command", "fit"},
                 {"config", config},
                 {"results", results},
                 {"errors", errors.list}};
        write_text(o.out, format_json(doc));
    }
    return errors.any() ? 1 : 0;
}

// ------------------------------------------------------------- changepoint

struct ChangepointOpts {
    std::vector<std::string> series;
    std::string manifest;
    std::string set_name;
    int bin_width = 5;
    long long min_tokens = kDefaultMinTokens;
    double generation_time = 0.0;
    bool equalize = false;
    bool token_weighted = false;
    int replicates = 500;
    double p_threshold = 0.05;
    int max_depth = 3;
    std::uint64_t seed = 0;
    std::string out;
};

int run_changepoint(const ChangepointOpts& o) {
    if (o.series.empty() == o.manifest.empty())
        throw std::runtime_error("changepoint: pass exactly one of --series or --manifest");

    ItemErrors errors;
    std::vector<std::pair<std::string, TimeSeries>> inputs;
    for (const std::string& path : o.series) {
        try {
            TimeSeries s = read_series_csv(path);
            inputs.emplace_back(s.label, std::move(s));
        } catch (const std::exception& ex) {
            errors.add(path, ex.what());
        }
    }
    if (!o.manifest.empty()) {
        auto sets = read_manifest(o.manifest);
        if (!o.set_name.empty() && !sets.count(o.set_name))
            throw std::runtime_error("manifest has no set named " + o.set_name);
        for (const auto& [name, files] : sets) {
            if (!o.set_name.empty() && name != o.set_name) continue;
            try {
                std::vector<VariantCounts> words;
                int origin = std::numeric_limits<int>::max();
                for (const std::string& f : files) {
                    words.push_back(read_counts_csv(f));
                    for (const auto& r : words.back().rows) origin = std::min(origin, r.year);
                }
                std::vector<TimeSeries> binned;
                for (const auto& w : words)
                    binned.push_back(bin_counts(w, BinSpec{o.bin_width, origin}, o.min_tokens));
                TimeSeries agg = aggregate_word_set(binned, o.token_weighted);
                agg.label = name;
                inputs.emplace_back(name, std::move(agg));
            } catch (const std::exception& ex) {
                errors.add(name, ex.what());
            }
        }
    }

    json results = json::array();
    int done = 0;
    for (auto& [label, series] : inputs) {
        std::cerr << "[" << ++done << "/" << inputs.size() << "] changepoint " << label << " ("
                  << o.replicates << " replicates per node)\n";
        try {
            TimeSeries working = series;
            if (o.equalize) working = equalize_sampling(working, derive_seed(o.seed, done));
            double g = o.generation_time > 0.0 ? o.generation_time
                                               : default_generation_time(working);
            ChangePointNode tree =
                recursive_detect(working, g, o.p_threshold, o.replicates, o.max_depth, o.seed);
            results.push_back(json{{"label", label},
                                   {"generation_time", g},
                                   {"tree", node_json(tree)},
                                   {"splits", significant_splits(tree)}});
        } catch (const std::exception& ex) {
            errors.add(label, ex.what());
        }
    }

    json config{{"command", "changepoint"},
                {"schema_version", kSchemaVersion},
                {"series", o.series},
                {"manifest", o.manifest},
                {"set", o.set_name},
                {"bin_width", o.bin_width},
                {"min_tokens", o.min_tokens},
                {"equalize", o.equalize},
                {"token_weighted", o.token_weighted},
                {"replicates", o.replicates},
                {"p_threshold", o.p_threshold},
                {"max_depth", o.max_depth},
                {"seed", o.seed}};
    json doc{{"schema_version", kSchemaVersion},
             {"command", "changepoint"},
             {"config", config},
             {"results", results},
             {"errors", errors.list}};
    write_text(o.out, format_json(doc));
    return errors.any() ? 1 : 0;
}

// ----------------------------------------------------------------- analyze

struct AnalyzeOpts {
    std::vector<std::string> fits;
    std::string g_test_counts;
    bool sweep = false;
    double popsize = 50.0;
    int k = 1;
    std::string s_values = "0,0.5";
    int x0_count = 21;
    double p_threshold = 0.05;
    std::string out;
};

ContingencyTable parse_table(const std::string& text) {
    ContingencyTable table;
    std::stringstream rows(text);
    std::string row;
    int i = 0;
    while (std::getline(rows, row, ';')) {
        if (i >= 2) throw std::runtime_error("g-test table must have 2 rows");
        std::stringstream cols(row);
        std::string cell;
        int j = 0;
        while (std::getline(cols, cell, ',')) {
            if (j >= 3) throw std::runtime_error("g-test table must have 3 columns");
            table.counts[i][j++] = std::stoll(cell);
        }
        if (j != 3) throw std::runtime_error("g-test table must have 3 columns");
        ++i;
    }
    if (i != 2) throw std::runtime_error("g-test table must have 2 rows");
    return table;
}

int run_analyze(const AnalyzeOpts& o) {
    int modes = (!o.fits.empty()) + (!o.g_test_counts.empty()) + (o.sweep ? 1 : 0);
    if (modes != 1)
        throw std::runtime_error("analyze: pass exactly one of --fits, --g-test or --sweep");

    json config{{"command", "analyze"},
                {"schema_version", kSchemaVersion},
                {"p_threshold", o.p_threshold}};

    if (!o.g_test_counts.empty()) {
        GTestResult r = g_test(parse_table(o.g_test_counts));
        config["g_test"] = o.g_test_counts;
        json doc{{"schema_version", kSchemaVersion},
                 {"command", "analyze"},
                 {"config", config},
                 {"g", r.g},
                 {"dof", r.dof},
                 {"p", r.p}};
        write_text(o.out, format_json(doc));
        return 0;
    }

    if (o.sweep) {
        if (o.x0_count < 2) throw std::runtime_error("--x0-count must be >= 2");
        std::vector<double> svals = parse_double_list(o.s_values);
        std::vector<double> grid;
        for (int i = 0; i < o.x0_count; ++i)
            grid.push_back(static_cast<double>(i) / (o.x0_count - 1));
        config["popsize"] = o.popsize;
        config["k"] = o.k;
        config["s_values"] = svals;
        config["x0_count"] = o.x0_count;

        std::vector<SweepRow> rows = distance_sweep(o.popsize, svals, o.k, grid);
        std::ostringstream body;
        body << "# config: " << config.dump() << "\n";
        body << "x0,s,tv_bws,tv_normal\n";
        char buf[128];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.x0, r.s, r.tv_bws,
                          r.tv_normal);
            body << buf;
        }
        write_text(o.out, body.str());
        return 0;
    }

    ItemErrors errors;
    std::map<std::string, std::vector<std::pair<double, double>>> pooled;
    for (const std::string& path : o.fits) {
        try {
            std::ifstream in(path);
            if (!in) throw std::runtime_error("cannot open fits file");
            json doc;
            in >> doc;
            for (const auto& r : doc.at("results")) {
                if (!r.contains("p_value")) {
                    errors.add(r.value("label", "?"), "fit entry lacks a p_value");
                    continue;
                }
                pooled[r.at("label").get<std::string>()].emplace_back(
                    r.at("s").get<double>(), r.at("p_value").get<double>());
            }
        } catch (const std::exception& ex) {
            errors.add(path, ex.what());
        }
    }
    size_t expected = 0;
    for (const auto& [label, pairs] : pooled) expected = std::max(expected, pairs.size());
    config["fits"] = o.fits;

    std::ostringstream body;
    body << "# config: " << config.dump() << "\n";
    body << "label,cx,cy,ax1,ax2,angle,class\n";
    char buf[256];
    for (const auto& [label, pairs] : pooled) {
        if (pairs.size() < expected)
            std::cerr << "warning: " << label << " present in only " << pairs.size() << "/"
                      << expected << " binnings\n";
        EllipseSummary e = ellipse_from_fits(label, pairs);
        RegionClass cls = classify_region(e, o.p_threshold);
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", label.c_str(),
                      e.center_s, e.center_indicator, e.axis_major, e.axis_minor, e.angle,
                      to_string(cls).c_str());
        body << buf;
    }
    write_text(o.out, body.str());
    return errors.any() ? 1 : 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Wright-Fisher selection inference on frequency time series"};
    app.require_subcommand(1);

    auto sim = std::make_shared<SimulateOpts>();
    CLI::App* c_sim = app.add_subcommand("simulate", "simulate a trajectory");
    c_sim->add_option("--popsize", sim->popsize, "effective population size")->required();
    c_sim->add_option("--sel", sim->sel, "selection strength");
    c_sim->add_option("--sel-schedule", sim->schedule, "piecewise schedule t:s,t:s");
    c_sim->add_option("--x0", sim->x0, "starting frequency")->required();
    c_sim->add_option("--generations", sim->generations, "generations to simulate")->required();
    c_sim->add_option("--observe-every", sim->observe_every, "keep every n-th generation");
    c_sim->add_option("--seed", sim->seed, "RNG seed");
    c_sim->add_option("--out", sim->out, "output CSV (default stdout)");

    auto fit = std::make_shared<FitOpts>();
    CLI::App* c_fit = app.add_subcommand("fit", "fit drift/selection models");
    c_fit->add_option("--series", fit->series, "series CSV files");
    c_fit->add_option("--counts", fit->counts, "per-word counts CSV files");
    c_fit->add_option("--bin-widths", fit->bin_widths, "bin widths, e.g. 10,20,40");
    c_fit->add_option("--origin-year", fit->origin_year, "bin origin (default: earliest year)");
    c_fit->add_option("--min-tokens", fit->min_tokens, "minimum tokens per bin");
    c_fit->add_option("--generation-time", fit->generation_time,
                      "time units per generation (default: smallest gap)");
    c_fit->add_option("--replicates", fit->replicates, "bootstrap replicates");
    c_fit->add_option("--bootstrap-init", fit->bootstrap_init, "observed_start|uniform");
    c_fit->add_flag("--equalize", fit->equalize, "equalize sampling error across bins");
    c_fit->add_option("--seed", fit->seed, "RNG seed");
    c_fit->add_option("--out", fit->out, "output path (default stdout)");
    c_fit->add_option("--format", fit->format, "json|csv");

    auto cp = std::make_shared<ChangepointOpts>();
    CLI::App* c_cp = app.add_subcommand("changepoint", "detect changes in (N, s)");
    c_cp->add_option("--series", cp->series, "series CSV files");
    c_cp->add_option("--manifest", cp->manifest, "word-set manifest JSON");
    c_cp->add_option("--set", cp->set_name, "restrict to one named set");
    c_cp->add_option("--bin-width", cp->bin_width, "bin width in years (with --manifest)");
    c_cp->add_option("--min-tokens", cp->min_tokens, "minimum tokens per bin");
    c_cp->add_option("--generation-time", cp->generation_time,
                     "time units per generation (default: smallest gap)");
    c_cp->add_flag("--equalize", cp->equalize, "equalize sampling error across bins");
    c_cp->add_flag("--token-weighted", cp->token_weighted, "token-weighted word-set mean");
    c_cp->add_option("--replicates", cp->replicates, "bootstrap replicates per split test");
    c_cp->add_option("--p-threshold", cp->p_threshold, "significance threshold");
    c_cp->add_option("--max-depth", cp->max_depth, "recursive subdivision depth limit");
    c_cp->add_option("--seed", cp->seed, "RNG seed");
    c_cp->add_option("--out", cp->out, "output path (default stdout)");

    auto an = std::make_shared<AnalyzeOpts>();
    CLI::App* c_an = app.add_subcommand("analyze", "ellipses, G-test, distance sweeps");
    c_an->add_option("--fits", an->fits, "fit-result JSON files to pool");
    c_an->add_option("--g-test", an->g_test_counts, "counts r1c1,r1c2,r1c3;r2c1,r2c2,r2c3");
    c_an->add_flag("--sweep", an->sweep, "emit BwS/normal distance sweep");
    c_an->add_option("--popsize", an->popsize, "sweep population size");
    c_an->add_option("--k", an->k, "sweep elapsed generations");
    c_an->add_option("--s-values", an->s_values, "sweep selection strengths");
    c_an->add_option("--x0-count", an->x0_count, "sweep grid size over [0,1]");
    c_an->add_option("--p-threshold", an->p_threshold, "classification threshold");
    c_an->add_option("--out", an->out, "output path (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (c_sim->parsed()) return run_simulate(*sim);
        if (c_fit->parsed()) return run_fit(*fit);
        if (c_cp->parsed()) return run_changepoint(*cp);
        if (c_an->parsed()) return run_analyze(*an);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace wfsel::cli
