#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wfsel/inference.hpp"

namespace wfsel {

// Fewest observations a segment may hold (two transitions).
constexpr int kMinSegmentPoints = 3;
// Fewest observations needed to scan for a split (three per side).
constexpr int kMinScanPoints = 6;

// Five-parameter split fit: (N1, s1) before the split, (N2, s2) after,
// and the split time T.  The observation immediately before T is shared:
// it closes the left transition chain and opens the right one, so every
// transition is scored exactly once.
struct SplitFit {
    double split_time = 0.0;
    WfParams before;
    WfParams after;
    double loglik_before = 0.0;
    double loglik_after = 0.0;

    double loglik() const { return loglik_before + loglik_after; }
};

// One node of the recursive subdivision tree.
struct ChangePointNode {
    double t_begin = 0.0;
    double t_end = 0.0;
    int n_points = 0;

    WfParams const_params;        // constant-model fit over this segment
    double loglik_const = 0.0;

    std::optional<SplitFit> split;  // absent when the segment is too short
    double lambda_split = 0.0;      // 2(loglik_split - loglik_const)

    std::optional<double> p_value;
    long long exceed_count = 0;
    int replicates = 0;
    int replicates_used = 0;
    int replicates_failed = 0;

    bool significant = false;       // p < threshold
    std::vector<ChangePointNode> children;  // empty, or {left, right}
};

// Fit the split model at a fixed candidate time T (strictly between two
// observations, at least three observations strictly on each side).
SplitFit fit_split(const TimeSeries& series, double split_time, double generation_time,
                   std::optional<WfParams> warm_start = std::nullopt,
                   const FitOptions& options = {});

// Evaluate fit_split at every admissible inter-observation midpoint and
// keep the argmax.  No p-value yet.
ChangePointNode scan_split(const TimeSeries& series, double generation_time,
                           const FitOptions& options = {});

// Parametric bootstrap for the split: simulate `replicates` series from
// the constant fit (s free), rescan each, and report
// (1 + #{lambda_rep >= lambda_obs}) / (used + 1).
ChangePointNode changepoint_p_value(const TimeSeries& series, double generation_time,
                                    int replicates, std::uint64_t seed,
                                    const FitOptions& options = {});

// Recursive subdivision: split where p < threshold and recurse on both
// sub-series (depth-limited), sharing the boundary observation.
ChangePointNode recursive_detect(const TimeSeries& series, double generation_time,
                                 double threshold = 0.05, int replicates = 500,
                                 int max_depth = 3, std::uint64_t seed = 0,
                                 const FitOptions& options = {});

// Significant split times of a tree, in time order.
std::vector<double> significant_splits(const ChangePointNode& node);

}  // namespace wfsel
