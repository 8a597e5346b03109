#include "wfsel/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wfsel {

void TimeSeries::validate() const {
    for (size_t i = 0; i < points.size(); ++i) {
        const Point& p = points[i];
        if (!std::isfinite(p.time) || !std::isfinite(p.freq))
            throw std::invalid_argument("TimeSeries: non-finite entry");
        if (p.freq < 0.0 || p.freq > 1.0)
            throw std::invalid_argument("TimeSeries: frequency outside [0, 1]");
        if (i > 0 && !(p.time > points[i - 1].time))
            throw std::invalid_argument("TimeSeries: times must be strictly increasing");
    }
}

double default_generation_time(const TimeSeries& series) {
    if (series.size() < 2)
        throw std::invalid_argument("default_generation_time: need at least 2 points");
    double g = INFINITY;
    for (int i = 1; i < series.size(); ++i)
        g = std::min(g, series.points[i].time - series.points[i - 1].time);
    return g;
}

std::vector<int> generation_gaps(const TimeSeries& series, double generation_time) {
    if (series.size() < 2)
        throw std::invalid_argument("generation_gaps: need at least 2 points");
    if (!(generation_time > 0.0))
        throw std::invalid_argument("generation_gaps: generation time must be positive");
    std::vector<int> gaps;
    gaps.reserve(series.size() - 1);
    for (int i = 1; i < series.size(); ++i) {
        double dt = series.points[i].time - series.points[i - 1].time;
        double ratio = dt / generation_time;
        long long k = std::llround(ratio);
        if (k < 1 || std::fabs(ratio - static_cast<double>(k)) > 1e-6 * std::max(1.0, ratio))
            throw std::invalid_argument(
                "generation_gaps: observation gap is not an integer multiple of the "
                "generation time; re-bin the series or pass a different --generation-time");
        gaps.push_back(static_cast<int>(k));
    }
    return gaps;
}

TimeSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open series file: " + path);
    TimeSeries series;
    {
        size_t slash = path.find_last_of('/');
        std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
        size_t dot = base.find_last_of('.');
        series.label = dot == std::string::npos ? base : base.substr(0, dot);
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
            if (line.rfind("time", 0) == 0) continue;  // header row
        }
        std::stringstream ss(line);
        std::string field;
        TimeSeries::Point p;
        try {
            if (!std::getline(ss, field, ',')) continue;
            p.time = std::stod(field);
            if (!std::getline(ss, field, ','))
                throw std::runtime_error("missing frequency");
            p.freq = std::stod(field);
            if (std::getline(ss, field, ',') && !field.empty())
                p.tokens = std::stoll(field);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed series row");
        }
        series.points.push_back(p);
    }
    std::sort(series.points.begin(), series.points.end(),
              [](const auto& a, const auto& b) { return a.time < b.time; });
    series.validate();
    return series;
}

void write_series_csv(const TimeSeries& series, const std::string& path,
                      const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write series file: " + path);
    if (!comment.empty()) out << "# " << comment << "\n";
    bool any_tokens = false;
    for (const auto& p : series.points) any_tokens |= p.tokens.has_value();
    out << (any_tokens ? "time,frequency,tokens\n" : "time,frequency\n");
    char buf[96];
    for (const auto& p : series.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", p.time, p.freq);
        out << buf;
        if (any_tokens) out << ',' << (p.tokens ? *p.tokens : 0);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace wfsel
