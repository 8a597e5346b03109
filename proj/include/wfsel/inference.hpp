#pragma once

#include <cstdint>
#include <optional>

#include "wfsel/series.hpp"
#include "wfsel/wright_fisher.hpp"

namespace wfsel {

// Search brackets and stopping rule for the coordinate ascent.
struct FitOptions {
    double log10n_lo = 0.0;
    double log10n_hi = 7.0;
    double s_lo = -kMaxSelStrength;
    double s_hi = kMaxSelStrength;
    double coord_tol = 1e-4;  // sweep stops when both coordinates move less
    int max_sweeps = 50;
};

struct FitOutcome {
    WfParams params;
    double loglik = 0.0;
    bool converged = true;
    int sweeps = 0;
};

// Where bootstrap replicate series start (the paper does not pin this
// down; observed_start anchors them at the observed first frequency).
enum class BootstrapInit { observed_start, uniform };

struct FitResult {
    WfParams sel_fit;          // (N*, s*)
    WfParams drift_fit;        // (N0*, 0)
    double loglik_sel = 0.0;
    double loglik_drift = 0.0;
    double lambda = 0.0;       // 2(loglik_sel - loglik_drift), >= 0
    std::optional<double> p_value;
    long long exceed_count = 0;   // replicates with lambda_rep >= lambda_obs
    int replicates = 0;           // requested
    int replicates_used = 0;
    int replicates_failed = 0;
    double generation_time = 1.0;
    std::uint64_t seed = 0;
    bool converged = true;
};

// Sum over consecutive observation pairs of the log BwS transition
// density (Markov factorization of the series likelihood).
double log_likelihood(const TimeSeries& series, const WfParams& params,
                      double generation_time);

// Coordinate ascent: golden-section over log10 N and over s, alternating
// until both coordinates move less than coord_tol.  Starts from `init`
// when given, otherwise from the drift fit.  A sweep is only accepted
// when it improves the log likelihood, so the result never falls below
// the starting point.
FitOutcome fit(const TimeSeries& series, double generation_time,
               std::optional<WfParams> init = std::nullopt,
               const FitOptions& options = {});

// Drift-restricted fit: s pinned to 0, single golden-section over log10 N.
FitOutcome fit_drift(const TimeSeries& series, double generation_time,
                     const FitOptions& options = {});

// Both fits plus the likelihood-ratio statistic; no bootstrap.
FitResult fit_series(const TimeSeries& series, double generation_time,
                     const FitOptions& options = {});

// Parametric bootstrap under the drift fit: simulate `replicates` series
// at (N0*, s=0) sampled at the observed times, refit each, and report
// the empirical p-value (1 + #{lambda_rep >= lambda_obs}) / (used + 1).
// replicates == 0 leaves p_value absent.  Deterministic for a fixed
// seed; replicates run in parallel with per-index RNG streams.
FitResult drift_p_value(const TimeSeries& series, double generation_time,
                        int replicates, std::uint64_t seed,
                        BootstrapInit init = BootstrapInit::observed_start,
                        const FitOptions& options = {});

// Replicate helper shared with the change-point bootstrap: a synthetic
// series with the same observation times as `series`, simulated under
// `params` from the given starting frequency.
TimeSeries simulate_at_times(const TimeSeries& series, const WfParams& params,
                             double generation_time, double x_start, std::uint64_t seed);

}  // namespace wfsel
