#pragma once

#include <array>
#include <string>
#include <vector>

namespace wfsel {

// One-standard-deviation variability ellipse of (s, 1 - p) pairs
// gathered across binning strategies.
struct EllipseSummary {
    std::string label;
    double center_s = 0.0;
    double center_indicator = 0.0;  // mean of 1 - p
    double axis_major = 0.0;        // sqrt of the larger covariance eigenvalue
    double axis_minor = 0.0;
    double angle = 0.0;             // radians of the major axis
    int n_binnings = 0;
};

enum class RegionClass { irregularising, inconclusive, non_irregularising };

std::string to_string(RegionClass c);

// Rows: the focal word set and its baseline set.  Columns: the region
// classes (irregularising, inconclusive, non-irregularising).
struct ContingencyTable {
    std::array<std::array<long long, 3>, 2> counts{};
};

struct GTestResult {
    double g = 0.0;
    int dof = 0;
    double p = 1.0;
};

struct SweepRow {
    double x0 = 0.0;
    double s = 0.0;
    double tv_bws = 0.0;
    double tv_normal = 0.0;
};

// Center/axes/angle from the sample covariance (divisor n-1) of the
// (s, 1-p) pairs; a single pair yields a degenerate zero-axis ellipse.
EllipseSummary ellipse_from_fits(const std::string& label,
                                 const std::vector<std::pair<double, double>>& s_p_pairs);

// Classify against the region {s > 0, 1 - p > 1 - p_threshold} using the
// ellipse's axis-aligned bounding extent (conservative containment).
RegionClass classify_region(const EllipseSummary& summary, double p_threshold = 0.05);

// Likelihood-ratio goodness of fit of the focal row against the baseline
// row's proportions: G = 2 sum O ln(O/E) with E = n_focal * baseline
// proportions, dof = columns - 1, p from the chi-squared upper tail.
GTestResult g_test(const ContingencyTable& table);

// Total-variation distances of the BwS and normal approximations to the
// exact k-step transition, per (x0, s) combination.
std::vector<SweepRow> distance_sweep(double popsize, const std::vector<double>& s_values,
                                     int k, const std::vector<double>& x0_grid);

}  // namespace wfsel
