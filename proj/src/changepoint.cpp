#include "wfsel/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wfsel/parallel.hpp"
#include "wfsel/rng.hpp"

namespace wfsel {

namespace {

TimeSeries slice(const TimeSeries& series, int first, int last) {  // inclusive
    TimeSeries out;
    out.label = series.label;
    out.points.assign(series.points.begin() + first, series.points.begin() + last + 1);
    return out;
}

// Index of the last observation strictly before T.
int boundary_index(const TimeSeries& series, double split_time) {
    int m = series.size();
    int j = -1;
    for (int i = 0; i < m; ++i) {
        if (series.points[i].time < split_time) j = i;
        if (series.points[i].time == split_time)
            throw std::invalid_argument("fit_split: split time must lie between observations");
    }
    if (j < 0 || j >= m - 1)
        throw std::invalid_argument("fit_split: split time outside the observed range");
    return j;
}

ChangePointNode scan_common(const TimeSeries& series, double generation_time,
                            const FitOptions& options) {
    series.validate();
    if (series.size() < kMinScanPoints)
        throw std::invalid_argument("scan_split: need at least 6 observations");

    ChangePointNode node;
    node.t_begin = series.points.front().time;
    node.t_end = series.points.back().time;
    node.n_points = series.size();

    FitOutcome cfit = fit(series, generation_time, std::nullopt, options);
    node.const_params = cfit.params;
    node.loglik_const = cfit.loglik;

    // Candidate split times are the inter-observation midpoints with at
    // least three observations strictly on each side; the likelihood is
    // piecewise constant in T between observations.
    const int m = series.size();
    for (int j = kMinSegmentPoints - 1; j <= m - kMinSegmentPoints - 1; ++j) {
        double t_mid = 0.5 * (series.points[j].time + series.points[j + 1].time);
        SplitFit cand = fit_split(series, t_mid, generation_time, cfit.params, options);
        if (!node.split || cand.loglik() > node.split->loglik()) node.split = cand;
    }
    node.lambda_split = std::max(0.0, 2.0 * (node.split->loglik() - node.loglik_const));
    return node;
}

}  // namespace

SplitFit fit_split(const TimeSeries& series, double split_time, double generation_time,
                   std::optional<WfParams> warm_start, const FitOptions& options) {
    series.validate();
    int j = boundary_index(series, split_time);
    int m = series.size();
    if (j + 1 < kMinSegmentPoints || m - 1 - j < kMinSegmentPoints)
        throw std::invalid_argument("fit_split: need at least 3 observations per side");

    TimeSeries left = slice(series, 0, j);
    TimeSeries right = slice(series, j, m - 1);

    FitOutcome fl = fit(left, generation_time, warm_start, options);
    FitOutcome fr = fit(right, generation_time, warm_start, options);

    SplitFit out;
    out.split_time = split_time;
    out.before = fl.params;
    out.after = fr.params;
    out.loglik_before = fl.loglik;
    out.loglik_after = fr.loglik;
    return out;
}

ChangePointNode scan_split(const TimeSeries& series, double generation_time,
                           const FitOptions& options) {
    return scan_common(series, generation_time, options);
}

ChangePointNode changepoint_p_value(const TimeSeries& series, double generation_time,
                                    int replicates, std::uint64_t seed,
                                    const FitOptions& options) {
    if (replicates < 0)
        throw std::invalid_argument("changepoint_p_value: replicates must be >= 0");
    ChangePointNode node = scan_common(series, generation_time, options);
    node.replicates = replicates;
    if (replicates == 0) return node;

    std::vector<double> lambdas(replicates, -1.0);
    parallel_for(replicates, [&](int r) {
        std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        try {
            TimeSeries rep = simulate_at_times(series, node.const_params, generation_time,
                                               series.points[0].freq, rep_seed);
            lambdas[r] = scan_common(rep, generation_time, options).lambda_split;
        } catch (const std::exception&) {
            lambdas[r] = -1.0;
        }
    });
    for (double l : lambdas) {
        if (l < 0.0) {
            ++node.replicates_failed;
        } else {
            ++node.replicates_used;
            if (l >= node.lambda_split) ++node.exceed_count;
        }
    }
    node.p_value = (1.0 + static_cast<double>(node.exceed_count)) /
                   (static_cast<double>(node.replicates_used) + 1.0);
    return node;
}

namespace {

ChangePointNode detect_recursive(const TimeSeries& series, double generation_time,
                                 double threshold, int replicates, int max_depth,
                                 std::uint64_t seed, int depth, const FitOptions& options) {
    if (series.size() < kMinScanPoints) {
        // Leaf too short to scan: keep the constant fit for reporting.
        ChangePointNode node;
        node.t_begin = series.points.front().time;
        node.t_end = series.points.back().time;
        node.n_points = series.size();
        FitOutcome cfit = fit(series, generation_time, std::nullopt, options);
        node.const_params = cfit.params;
        node.loglik_const = cfit.loglik;
        return node;
    }

    ChangePointNode node = changepoint_p_value(series, generation_time, replicates, seed, options);
    node.significant = node.p_value && *node.p_value < threshold;
    if (node.significant && depth < max_depth) {
        int j = boundary_index(series, node.split->split_time);
        TimeSeries left = slice(series, 0, j);
        TimeSeries right = slice(series, j, series.size() - 1);
        node.children.push_back(detect_recursive(left, generation_time, threshold, replicates,
                                                 max_depth, derive_seed(seed, 2 * depth + 1),
                                                 depth + 1, options));
        node.children.push_back(detect_recursive(right, generation_time, threshold, replicates,
                                                 max_depth, derive_seed(seed, 2 * depth + 2),
                                                 depth + 1, options));
    }
    return node;
}

}  // namespace

ChangePointNode recursive_detect(const TimeSeries& series, double generation_time,
                                 double threshold, int replicates, int max_depth,
                                 std::uint64_t seed, const FitOptions& options) {
    return detect_recursive(series, generation_time, threshold, replicates, max_depth, seed,
                            0, options);
}

std::vector<double> significant_splits(const ChangePointNode& node) {
    std::vector<double> out;
    if (node.significant && node.split) out.push_back(node.split->split_time);
    for (const auto& child : node.children) {
        std::vector<double> sub = significant_splits(child);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace wfsel
