#include "wfsel/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wfsel/beta_spikes.hpp"
#include "wfsel/parallel.hpp"
#include "wfsel/rng.hpp"

namespace wfsel {

namespace {

struct SeriesView {
    std::vector<double> x;
    std::vector<int> k;
};

SeriesView make_view(const TimeSeries& series, double generation_time) {
    series.validate();
    SeriesView v;
    v.k = generation_gaps(series, generation_time);
    v.x.reserve(series.size());
    for (const auto& p : series.points) v.x.push_back(p.freq);
    return v;
}

double view_log_likelihood(const SeriesView& v, const WfParams& params) {
    double ll = 0.0;
    for (size_t i = 0; i + 1 < v.x.size(); ++i) {
        BwsTransition trans = bws_k_step(v.x[i], params, v.k[i]);
        ll += bws_log_density(trans, v.x[i + 1]);
    }
    return ll;
}

// Golden-section maximization on [lo, hi]; returns the better of the two
// final interior points.  Non-finite values are treated as -inf.
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
    constexpr double kRatio = 0.6180339887498949;
    auto safe = [&](double x) {
        double v = f(x);
        return std::isfinite(v) ? v : -1e308;
    };
    double a = lo, b = hi;
    double x1 = b - kRatio * (b - a);
    double x2 = a + kRatio * (b - a);
    double f1 = safe(x1), f2 = safe(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kRatio * (b - a);
            f2 = safe(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kRatio * (b - a);
            f1 = safe(x1);
        }
    }
    return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

FitOutcome fit_view(const SeriesView& view, std::optional<WfParams> init,
                    const FitOptions& opt) {
    const double inner_tol = 0.1 * opt.coord_tol;
    auto ll_at = [&](double log10n, double s) {
        return view_log_likelihood(view, WfParams(std::pow(10.0, log10n), s));
    };

    double u, s, best;
    if (init) {
        u = std::clamp(std::log10(init->popsize), opt.log10n_lo, opt.log10n_hi);
        s = std::clamp(init->selstrength, opt.s_lo, opt.s_hi);
        best = ll_at(u, s);
    } else {
        auto [u0, ll0] = golden_max([&](double v) { return ll_at(v, 0.0); },
                                    opt.log10n_lo, opt.log10n_hi, inner_tol);
        u = u0;
        s = 0.0;
        best = ll0;
    }

    FitOutcome out;
    out.converged = false;
    for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        out.sweeps = sweep;
        double ds = 0.0, du = 0.0;
        auto [s1, lls] = golden_max([&](double v) { return ll_at(u, v); },
                                    opt.s_lo, opt.s_hi, inner_tol);
        if (lls > best) {
            ds = std::fabs(s1 - s);
            s = s1;
            best = lls;
        }
        auto [u1, llu] = golden_max([&](double v) { return ll_at(v, s); },
                                    opt.log10n_lo, opt.log10n_hi, inner_tol);
        if (llu > best) {
            du = std::fabs(u1 - u);
            u = u1;
            best = llu;
        }
        if (ds < opt.coord_tol && du < opt.coord_tol) {
            out.converged = true;
            break;
        }
    }
    out.params = WfParams(std::pow(10.0, u), s);
    out.loglik = best;
    return out;
}

}  // namespace

double log_likelihood(const TimeSeries& series, const WfParams& params,
                      double generation_time) {
    return view_log_likelihood(make_view(series, generation_time), params);
}

FitOutcome fit(const TimeSeries& series, double generation_time,
               std::optional<WfParams> init, const FitOptions& options) {
    return fit_view(make_view(series, generation_time), init, options);
}

FitOutcome fit_drift(const TimeSeries& series, double generation_time,
                     const FitOptions& options) {
    SeriesView view = make_view(series, generation_time);
    const double inner_tol = 0.1 * options.coord_tol;
    auto [u, ll] = golden_max(
        [&](double v) {
            return view_log_likelihood(view, WfParams(std::pow(10.0, v), 0.0));
        },
        options.log10n_lo, options.log10n_hi, inner_tol);
    return FitOutcome{WfParams(std::pow(10.0, u), 0.0), ll, true, 1};
}

FitResult fit_series(const TimeSeries& series, double generation_time,
                     const FitOptions& options) {
    SeriesView view = make_view(series, generation_time);
    const double inner_tol = 0.1 * options.coord_tol;
    auto [u0, ll0] = golden_max(
        [&](double v) {
            return view_log_likelihood(view, WfParams(std::pow(10.0, v), 0.0));
        },
        options.log10n_lo, options.log10n_hi, inner_tol);
    WfParams drift(std::pow(10.0, u0), 0.0);

    // Start the selection fit from the drift optimum so nesting holds by
    // construction (sweeps are only accepted when they improve).
    FitOutcome sel = fit_view(view, drift, options);
    if (sel.loglik < ll0) {
        sel.params = drift;
        sel.loglik = ll0;
    }

    FitResult r;
    r.sel_fit = sel.params;
    r.drift_fit = drift;
    r.loglik_sel = sel.loglik;
    r.loglik_drift = ll0;
    r.lambda = std::max(0.0, 2.0 * (sel.loglik - ll0));
    r.generation_time = generation_time;
    r.converged = sel.converged;
    return r;
}

TimeSeries simulate_at_times(const TimeSeries& series, const WfParams& params,
                             double generation_time, double x_start, std::uint64_t seed) {
    std::vector<int> gaps = generation_gaps(series, generation_time);
    long long n = std::max(1LL, std::llround(params.popsize));

    // Round the start onto the simulation grid; keep interior starts
    // interior so the null process is not absorbed from the outset.
    long long c0 = std::llround(x_start * static_cast<double>(n));
    if (x_start > kBoundaryEps && c0 == 0) c0 = 1;
    if (x_start < 1.0 - kBoundaryEps && c0 == n) c0 = n - 1;

    int total = 0;
    for (int k : gaps) total += k;
    std::vector<double> traj =
        simulate_trajectory(static_cast<double>(c0) / static_cast<double>(n),
                            WfParams(static_cast<double>(n), params.selstrength),
                            total, seed);

    TimeSeries rep;
    rep.label = series.label;
    rep.points.reserve(series.size());
    int pos = 0;
    rep.points.push_back({series.points[0].time, traj[0], std::nullopt});
    for (size_t i = 0; i < gaps.size(); ++i) {
        pos += gaps[i];
        rep.points.push_back({series.points[i + 1].time, traj[pos], std::nullopt});
    }
    return rep;
}

FitResult drift_p_value(const TimeSeries& series, double generation_time,
                        int replicates, std::uint64_t seed, BootstrapInit init,
                        const FitOptions& options) {
    if (replicates < 0)
        throw std::invalid_argument("drift_p_value: replicates must be >= 0");
    FitResult obs = fit_series(series, generation_time, options);
    obs.seed = seed;
    obs.replicates = replicates;
    if (replicates == 0) return obs;

    std::vector<double> lambdas(replicates, -1.0);  // negative marks failure
    parallel_for(replicates, [&](int r) {
        std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        double x_start = series.points[0].freq;
        if (init == BootstrapInit::uniform) {
            auto rng = make_rng(rep_seed, 0x756e6966ULL);
            x_start = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        }
        try {
            TimeSeries rep =
                simulate_at_times(series, obs.drift_fit, generation_time, x_start, rep_seed);
            lambdas[r] = fit_series(rep, generation_time, options).lambda;
        } catch (const std::exception&) {
            lambdas[r] = -1.0;
        }
    });

    for (double l : lambdas) {
        if (l < 0.0) {
            ++obs.replicates_failed;
        } else {
            ++obs.replicates_used;
            if (l >= obs.lambda) ++obs.exceed_count;
        }
    }
    obs.p_value = (1.0 + static_cast<double>(obs.exceed_count)) /
                  (static_cast<double>(obs.replicates_used) + 1.0);
    return obs;
}

}  // namespace wfsel
