#include "wfsel/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wfsel/rng.hpp"

namespace wfsel {

void VariantCounts::validate() const {
    std::set<int> years;
    for (const Row& r : rows) {
        if (r.count_focal < 0 || r.count_other < 0)
            throw std::invalid_argument("VariantCounts: negative count for " + word);
        if (!years.insert(r.year).second)
            throw std::invalid_argument("VariantCounts: duplicate year " +
                                        std::to_string(r.year) + " for " + word);
    }
}

VariantCounts read_counts_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open counts file: " + path);
    VariantCounts counts;
    {
        size_t slash = path.find_last_of('/');
        std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
        size_t dot = base.find_last_of('.');
        counts.word = dot == std::string::npos ? base : base.substr(0, dot);
    }
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("year", 0) == 0) continue;
        }
        std::stringstream ss(line);
        std::string field;
        VariantCounts::Row row;
        try {
            std::getline(ss, field, ',');
            row.year = std::stoi(field);
            if (!std::getline(ss, field, ',')) throw std::runtime_error("short row");
            row.count_focal = std::stoll(field);
            if (!std::getline(ss, field, ',')) throw std::runtime_error("short row");
            row.count_other = std::stoll(field);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed counts row");
        }
        counts.rows.push_back(row);
    }
    counts.validate();
    return counts;
}

TimeSeries bin_counts(const VariantCounts& counts, const BinSpec& spec,
                      long long min_tokens) {
    counts.validate();
    if (spec.width_years < 1)
        throw std::invalid_argument("bin_counts: bin width must be >= 1 year");
    if (counts.rows.empty()) throw std::invalid_argument("bin_counts: no data");

    std::map<long long, std::pair<long long, long long>> bins;  // index -> (focal, total)
    for (const auto& row : counts.rows) {
        long long idx = static_cast<long long>(
            std::floor(static_cast<double>(row.year - spec.origin_year) / spec.width_years));
        auto& b = bins[idx];
        b.first += row.count_focal;
        b.second += row.count_focal + row.count_other;
    }

    TimeSeries series;
    series.label = counts.word;
    for (const auto& [idx, b] : bins) {
        if (b.second < std::max<long long>(1, min_tokens)) continue;
        double bin_start = spec.origin_year + static_cast<double>(idx) * spec.width_years;
        TimeSeries::Point p;
        p.time = bin_start + (spec.width_years - 1) / 2.0;  // midpoint of covered years
        p.freq = static_cast<double>(b.first) / static_cast<double>(b.second);
        p.tokens = b.second;
        series.points.push_back(p);
    }
    if (series.points.empty())
        throw std::runtime_error("bin_counts: no bin reaches min_tokens for " + counts.word);
    return series;
}

TimeSeries aggregate_word_set(const std::vector<TimeSeries>& series_list,
                              bool token_weighted) {
    if (series_list.empty())
        throw std::invalid_argument("aggregate_word_set: empty word set");

    struct Cell {
        double freq_sum = 0.0;
        double weight = 0.0;
        long long tokens = 0;
        int n = 0;
    };
    std::map<long long, Cell> cells;  // keyed on rounded time to merge identical bins
    auto key_of = [](double t) { return std::llround(t * 1024.0); };

    for (const TimeSeries& s : series_list) {
        for (const auto& p : s.points) {
            Cell& c = cells[key_of(p.time)];
            double w = 1.0;
            if (token_weighted) {
                if (!p.tokens)
                    throw std::invalid_argument(
                        "aggregate_word_set: token-weighted mean needs token counts");
                w = static_cast<double>(*p.tokens);
            }
            c.freq_sum += w * p.freq;
            c.weight += w;
            c.tokens += p.tokens.value_or(0);
            ++c.n;
        }
    }

    TimeSeries out;
    out.label = "aggregate";
    for (const auto& [key, c] : cells) {
        if (c.n == 0 || c.weight <= 0.0) continue;
        TimeSeries::Point p;
        p.time = static_cast<double>(key) / 1024.0;
        p.freq = c.freq_sum / c.weight;
        p.tokens = c.tokens;
        out.points.push_back(p);
    }
    if (out.points.empty()) throw std::runtime_error("aggregate_word_set: no populated bins");
    return out;
}

namespace {

// Exact sequential hypergeometric draw: successes among `draws` picks
// without replacement from `total` items of which `good` are successes.
long long hypergeometric(long long good, long long total, long long draws,
                         std::mt19937_64& rng) {
    long long hits = 0;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (long long i = 0; i < draws; ++i) {
        if (unif(rng) * static_cast<double>(total) < static_cast<double>(good)) {
            ++hits;
            --good;
        }
        --total;
    }
    return hits;
}

}  // namespace

TimeSeries equalize_sampling(const TimeSeries& series, std::uint64_t seed) {
    if (series.points.empty()) return series;
    long long n_min = -1;
    for (const auto& p : series.points) {
        if (!p.tokens)
            throw std::invalid_argument("equalize_sampling: every point needs a token count");
        n_min = n_min < 0 ? *p.tokens : std::min(n_min, *p.tokens);
    }
    if (n_min < 1) throw std::invalid_argument("equalize_sampling: empty bin in series");

    TimeSeries out = series;
    for (size_t i = 0; i < out.points.size(); ++i) {
        auto& p = out.points[i];
        long long n = *p.tokens;
        if (n == n_min) continue;
        long long good = std::llround(p.freq * static_cast<double>(n));
        auto rng = make_rng(seed, i);
        long long hits = hypergeometric(good, n, n_min, rng);
        p.freq = static_cast<double>(hits) / static_cast<double>(n_min);
        p.tokens = n_min;
    }
    return out;
}

bool usage_screen(const VariantCounts& counts, double threshold, int width_years,
                  long long min_tokens) {
    BinSpec spec;
    spec.width_years = width_years;
    spec.origin_year = counts.rows.empty() ? 0
        : std::min_element(counts.rows.begin(), counts.rows.end(),
                           [](const auto& a, const auto& b) { return a.year < b.year; })->year;
    try {
        TimeSeries binned = bin_counts(counts, spec, min_tokens);
        for (const auto& p : binned.points)
            if (p.freq > threshold && 1.0 - p.freq > threshold) return true;
    } catch (const std::runtime_error&) {
        return false;  // nothing above the token floor
    }
    return false;
}

std::map<std::string, std::vector<std::string>> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    nlohmann::json doc;
    in >> doc;
    if (!doc.contains("sets") || !doc["sets"].is_object())
        throw std::runtime_error("manifest: expected a top-level \"sets\" object");

    std::string dir;
    size_t slash = path.find_last_of('/');
    if (slash != std::string::npos) dir = path.substr(0, slash + 1);

    std::map<std::string, std::vector<std::string>> sets;
    for (const auto& [name, files] : doc["sets"].items()) {
        for (const auto& f : files) {
            std::string p = f.get<std::string>();
            if (!p.empty() && p[0] != '/') p = dir + p;
            sets[name].push_back(p);
        }
    }
    return sets;
}

}  // namespace wfsel
