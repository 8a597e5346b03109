#pragma once

#include <optional>
#include <string>
#include <vector>

namespace wfsel {

// Ordered (time, frequency) observations, optionally with the token
// count behind each frequency estimate.
struct TimeSeries {
    struct Point {
        double time = 0.0;
        double freq = 0.0;
        std::optional<long long> tokens;
    };

    std::string label;
    std::vector<Point> points;

    int size() const { return static_cast<int>(points.size()); }
    void validate() const;  // times strictly increasing, freqs in [0,1]
};

// Shortest gap between consecutive observations; the default generation
// time.
double default_generation_time(const TimeSeries& series);

// Number of generations in each inter-observation gap.  Throws if a gap
// is not an integer multiple of generation_time (1e-6 relative
// tolerance) or the series has fewer than two points.
std::vector<int> generation_gaps(const TimeSeries& series, double generation_time);

// CSV with header time,frequency[,tokens].  Lines starting with '#' are
// skipped.
TimeSeries read_series_csv(const std::string& path);
void write_series_csv(const TimeSeries& series, const std::string& path,
                      const std::string& comment = "");

}  // namespace wfsel
