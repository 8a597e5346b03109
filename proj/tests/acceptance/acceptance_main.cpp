// Acceptance suite: one criterion per section, one PASS/FAIL line each.
// Usage: acceptance [criterion numbers...]   (default: all)
// Criterion 8 needs user-supplied corpus counts; it is skipped unless
// WFSEL_SPANISH_DIR points at a directory with the per-word CSV files.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wfsel/beta_spikes.hpp"
#include "wfsel/changepoint.hpp"
#include "wfsel/corpus.hpp"
#include "wfsel/inference.hpp"
#include "wfsel/rng.hpp"
#include "wfsel/special.hpp"
#include "wfsel/stats.hpp"
#include "wfsel/wright_fisher.hpp"

using namespace wfsel;

namespace {

struct Outcome {
    int criterion = 0;
    bool ran = false;
    bool passed = false;
    bool skipped = false;
    std::string detail;
    double seconds = 0.0;
};

// Nesting tallies accumulated while criteria 3-6 run (criterion 7).
struct NestingTally {
    long long lambda_checks = 0;
    long long lambda_violations = 0;
    double lambda_worst = 0.0;
    long long split_checks = 0;
    long long split_violations = 0;
    double split_worst = 0.0;

    void record_fit(const FitResult& f) {
        ++lambda_checks;
        double l = 2.0 * (f.loglik_sel - f.loglik_drift);
        lambda_worst = std::min(lambda_worst, l);
        if (l < -1e-6) ++lambda_violations;
    }
    void record_scan(const ChangePointNode& n) {
        if (!n.split) return;
        ++split_checks;
        double d = n.split->loglik() - n.loglik_const;
        split_worst = std::min(split_worst, d);
        if (d < -1e-9) ++split_violations;
    }
};

NestingTally g_tally;

TimeSeries observed_series(const std::vector<double>& traj, int every, double dt) {
    TimeSeries s;
    for (size_t t = 0; t < traj.size(); t += every)
        s.points.push_back({static_cast<double>(t) * dt, traj[t], {}});
    return s;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------
// 1. Fig. 3 dominance at N=50, k=1 (hard, as specified) plus the
//    multi-generation sweep where the dominance genuinely holds.

Outcome criterion1() {
    Outcome out;
    out.criterion = 1;

    auto sweep_stats = [](int k, int& hold, double& worst, double& worst_x0, double& worst_s) {
        std::vector<double> grid;
        for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
        std::vector<SweepRow> rows = distance_sweep(50, {0.0, 0.5}, k, grid);
        hold = 0;
        worst = 1.0;
        for (const SweepRow& r : rows) {
            double margin = r.tv_normal - r.tv_bws;
            if (r.tv_bws <= r.tv_normal) ++hold;
            if (margin < worst) {
                worst = margin;
                worst_x0 = r.x0;
                worst_s = r.s;
            }
        }
        return static_cast<int>(rows.size());
    };

    int hold1 = 0, total1 = 0;
    double worst1 = 0, wx1 = 0, ws1 = 0;
    total1 = sweep_stats(1, hold1, worst1, wx1, ws1);
    out.passed = hold1 == total1;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "tv_bws <= tv_normal at %d/%d grid points (N=50, k=1); worst margin %+.5f "
                  "at (s=%.1f, x0=%.2f)",
                  hold1, total1, worst1, ws1, wx1);
    out.detail = buf;

    int hold5 = 0, total5 = 0;
    double worst5 = 0, wx5 = 0, ws5 = 0;
    total5 = sweep_stats(5, hold5, worst5, wx5, ws5);
    std::printf("  [info] same inequality at k=5: holds at %d/%d points (worst margin %+.5f);"
                " the spike/support advantage needs the multi-generation regime\n",
                hold5, total5, worst5);
    if (!out.passed)
        std::printf("  [info] at k=1 the matched Gaussian is closer in the bulk: excess\n"
                    "         kurtosis of Bin(50,1/2)/50 is -0.04 against the fitted Beta's\n"
                    "         -0.115 and the Gaussian's 0; k=1 boundary points do favor BwS\n");
    out.ran = true;
    return out;
}

// ---------------------------------------------------------------------------
// 2. G-test of the published contingency table.

Outcome criterion2() {
    Outcome out;
    out.criterion = 2;
    ContingencyTable t;
    t.counts = {{{9, 2, 8}, {7, 4, 23}}};
    GTestResult r = g_test(t);
    out.passed = std::fabs(r.p - 0.031) <= 0.002;
    char buf[128];
    std::snprintf(buf, sizeof buf, "counts [[9,2,8],[7,4,23]] -> G=%.4f, dof=%d, p=%.4f "
                  "(target 0.031 +- 0.002)", r.g, r.dof, r.p);
    out.detail = buf;
    out.ran = true;
    return out;
}

// ---------------------------------------------------------------------------
// 3. BwS log likelihood against the exact transition-matrix chain.

Outcome criterion3() {
    Outcome out;
    out.criterion = 3;
    const int n = 50;
    const std::uint64_t base_seed = 301;
    double worst = 0.0;
    int worst_series = -1;

    for (int rep = 0; rep < 20; ++rep) {
        auto rng = make_rng(base_seed, rep);
        std::uniform_real_distribution<double> us(-0.5, 0.5);
        std::uniform_int_distribution<int> uj(5, 45);
        double s_true = us(rng);
        double x0 = uj(rng) / static_cast<double>(n);
        WfParams params(n, s_true);
        TimeSeries ts = observed_series(
            simulate_trajectory(x0, params, 24, derive_seed(base_seed, 100 + rep)), 1, 1.0);

        double ll_bws = log_likelihood(ts, params, 1.0);
        double ll_exact = 0.0;
        int transitions = ts.size() - 1;
        for (int i = 0; i + 1 < ts.size(); ++i) {
            DiscreteDistribution d = one_step_transition(ts.points[i].freq, params);
            int j = static_cast<int>(std::llround(ts.points[i + 1].freq * n));
            double pmf = std::max(d.mass[j], 1e-300);
            ll_exact += std::log(pmf) + ((j > 0 && j < n) ? std::log(double(n)) : 0.0);
        }
        double per_transition = std::fabs(ll_bws - ll_exact) / transitions;
        if (per_transition > worst) {
            worst = per_transition;
            worst_series = rep;
        }
        g_tally.record_fit(fit_series(ts, 1.0));  // nesting check on the same fixture
    }
    out.passed = worst <= 0.15;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "20 random N=50 series, 1-generation gaps: worst |dLL| per transition "
                  "%.4f (tolerance 0.15, series %d)", worst, worst_series);
    out.detail = buf;
    out.ran = true;
    return out;
}

// ---------------------------------------------------------------------------
// 4. Parameter recovery on synthetic series.

Outcome criterion4() {
    Outcome out;
    out.criterion = 4;
    auto run_arm = [&](double s_true, std::uint64_t seed_base) {
        std::vector<double> fitted;
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<double> traj = simulate_trajectory(
                0.3, WfParams(1000, s_true), 100, derive_seed(seed_base, rep));
            TimeSeries ts = observed_series(traj, 5, 1.0);
            FitResult f = fit_series(ts, 1.0);
            g_tally.record_fit(f);
            fitted.push_back(f.sel_fit.selstrength);
        }
        return median(fitted);
    };
    double med_sel = run_arm(0.1, 401);
    double med_null = run_arm(0.0, 402);
    bool ok_sel = med_sel >= 0.05 && med_sel <= 0.15;
    bool ok_null = med_null >= -0.02 && med_null <= 0.02;
    out.passed = ok_sel && ok_null;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "median s* over 50 series: %.4f for s=0.1 (want [0.05,0.15]); %.4f for s=0 "
                  "(want [-0.02,0.02]); N=1000, 100 generations observed every 5",
                  med_sel, med_null);
    out.detail = buf;
    out.ran = true;
    return out;
}

// ---------------------------------------------------------------------------
// 5. Bootstrap p-value calibration under the null.

Outcome criterion5() {
    Outcome out;
    out.criterion = 5;

    // Reference fixture: a drift series whose fitted N0* seeds the nulls.
    TimeSeries ref = observed_series(
        simulate_trajectory(0.5, WfParams(1000, 0.0), 20, derive_seed(500, 0)), 1, 1.0);
    FitResult ref_fit = fit_series(ref, 1.0);
    long long n0 = std::llround(ref_fit.drift_fit.popsize);

    const int n_series = 200, replicates = 200;
    int low_p = 0;
    for (int i = 0; i < n_series; ++i) {
        TimeSeries null_series = observed_series(
            simulate_trajectory(0.5, WfParams(static_cast<double>(n0), 0.0), 20,
                                derive_seed(501, i)),
            1, 1.0);
        FitResult f = drift_p_value(null_series, 1.0, replicates, derive_seed(502, i));
        g_tally.record_fit(f);
        if (f.p_value && *f.p_value < 0.05) ++low_p;
    }
    double fraction = static_cast<double>(low_p) / n_series;
    out.passed = fraction >= 0.02 && fraction <= 0.08;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "fraction of null series with p<0.05: %.3f (%d/%d, want [0.02,0.08]); "
                  "null N0*=%lld, %d replicates each", fraction, low_p, n_series, n0,
                  replicates);
    out.detail = buf;
    out.ran = true;
    return out;
}

// ---------------------------------------------------------------------------
// 6. Change-point localization with bootstrap significance.

Outcome criterion6() {
    Outcome out;
    out.criterion = 6;
    const int n_series = 50, replicates = 500;
    const double dt = 5.0, t_true = 100.0;
    int localized = 0, significant = 0;

    for (int i = 0; i < n_series; ++i) {
        std::vector<double> up =
            simulate_trajectory(0.15, WfParams(1000, 0.2), 20, derive_seed(601, i));
        std::vector<double> down =
            simulate_trajectory(up.back(), WfParams(1000, -0.2), 20, derive_seed(602, i));
        TimeSeries ts;
        for (int t = 0; t <= 40; ++t)
            ts.points.push_back({t * dt, t <= 20 ? up[t] : down[t - 20], {}});

        ChangePointNode node = changepoint_p_value(ts, dt, replicates, derive_seed(603, i));
        g_tally.record_scan(node);
        bool sig = node.p_value && *node.p_value < 0.05;
        bool close = node.split && std::fabs(node.split->split_time - t_true) <= 2.0 * dt;
        if (sig) ++significant;
        if (sig && close) ++localized;
        std::fprintf(stderr, "  [c6 %2d/%d] T=%.1f p=%.4f\n", i + 1, n_series,
                     node.split ? node.split->split_time : -1.0,
                     node.p_value ? *node.p_value : -1.0);
    }
    double fraction = static_cast<double>(localized) / n_series;
    out.passed = fraction >= 0.80;
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "significant split within +-2 intervals of t=100 in %d/%d runs (%.0f%%, "
                  "want >=80%%); significant at all in %d/%d; s +0.2 -> -0.2, %d replicates",
                  localized, n_series, 100.0 * fraction, significant, n_series, replicates);
    out.detail = buf;
    out.ran = true;
    return out;
}

// ---------------------------------------------------------------------------
// 7. Nesting invariants tallied across criteria 3-6.

Outcome criterion7() {
    Outcome out;
    out.criterion = 7;
    out.passed = g_tally.lambda_violations == 0 && g_tally.split_violations == 0 &&
                 g_tally.lambda_checks > 0;
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "lambda >= -1e-6 in %lld/%lld fits (worst %+.2e); loglik_split >= "
                  "loglik_const - 1e-9 in %lld/%lld scans (worst %+.2e)",
                  g_tally.lambda_checks - g_tally.lambda_violations, g_tally.lambda_checks,
                  g_tally.lambda_worst, g_tally.split_checks - g_tally.split_violations,
                  g_tally.split_checks, g_tally.split_worst);
    out.detail = buf;
    out.ran = true;
    if (g_tally.lambda_checks == 0)
        out.detail += " (criteria 3-6 did not run; nothing to check)";
    return out;
}

// ---------------------------------------------------------------------------
// 8. Corpus-conditional reproduction (documented, not CI-gated).

Outcome criterion8() {
    Outcome out;
    out.criterion = 8;
    const char* dir = std::getenv("WFSEL_SPANISH_DIR");
    if (dir == nullptr || *dir == '\0') {
        out.skipped = true;
        out.detail = "set WFSEL_SPANISH_DIR to a directory with manifest.json and the "
                     "per-word count CSVs (see README for the extraction recipe)";
        out.ran = true;
        return out;
    }

    struct Expected {
        const char* set;
        double year;
        double s_before;
        double s_after;
    };
    // First detected division per reform set: year and the fitted
    // selection strengths on both sides.
    const Expected expected[] = {{"A_ss_to_s", 1775, -0.008, -0.37},
                                 {"B_x_to_j", 1825, -0.29, -0.07},
                                 {"C_y_to_i", 1815, -0.30, -0.06},
                                 {"D1_accentuation", 1890, -0.05, -0.21},
                                 {"D2_loss_of_accent", 1880, 0.13, -0.53}};

    auto sets = read_manifest(std::string(dir) + "/manifest.json");
    bool all_ok = true;
    std::string report;
    for (const Expected& e : expected) {
        auto it = sets.find(e.set);
        if (it == sets.end()) {
            report += std::string(e.set) + ": missing from manifest; ";
            all_ok = false;
            continue;
        }
        try {
            std::vector<VariantCounts> words;
            int origin = 1 << 30;
            for (const std::string& f : it->second) {
                words.push_back(read_counts_csv(f));
                for (const auto& r : words.back().rows) origin = std::min(origin, r.year);
            }
            std::vector<TimeSeries> binned;
            for (const auto& w : words)
                binned.push_back(bin_counts(w, BinSpec{5, origin}, 100));
            TimeSeries agg = equalize_sampling(aggregate_word_set(binned), 0);
            ChangePointNode node =
                changepoint_p_value(agg, default_generation_time(agg), 500, 0);
            bool year_ok = node.split && std::fabs(node.split->split_time - e.year) <= 5.0;
            bool signs_ok = node.split &&
                            std::signbit(node.split->before.selstrength) ==
                                std::signbit(e.s_before) &&
                            std::signbit(node.split->after.selstrength) ==
                                std::signbit(e.s_after);
            char buf[200];
            std::snprintf(buf, sizeof buf, "%s: T=%.1f (want %.0f+-5) s=%+.3f/%+.3f p=%.4f; ",
                          e.set, node.split ? node.split->split_time : -1.0, e.year,
                          node.split ? node.split->before.selstrength : 0.0,
                          node.split ? node.split->after.selstrength : 0.0,
                          node.p_value ? *node.p_value : -1.0);
            report += buf;
            all_ok = all_ok && year_ok && signs_ok;
        } catch (const std::exception& ex) {
            report += std::string(e.set) + ": " + ex.what() + "; ";
            all_ok = false;
        }
    }
    out.passed = all_ok;
    out.detail = report;
    out.ran = true;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    auto selected = [&](int c) { return wanted.empty() || wanted.count(c) > 0; };

    const char* names[] = {
        "",
        "Fig. 3 dominance: TV(BwS, exact) <= TV(normal, exact), N=50, k=1",
        "G-test of the irregularisation contingency table",
        "likelihood equivalence against the exact transition matrix",
        "parameter recovery on synthetic series",
        "bootstrap p-value calibration under the null",
        "change-point localization with bootstrap significance",
        "nesting invariants across criteria 3-6",
        "corpus-conditional reproduction of the reform analysis",
    };

    std::vector<Outcome> outcomes;
    for (int c = 1; c <= 8; ++c) {
        if (!selected(c)) continue;
        std::printf("criterion %d: %s\n", c, names[c]);
        std::fflush(stdout);
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        switch (c) {
            case 1: out = criterion1(); break;
            case 2: out = criterion2(); break;
            case 3: out = criterion3(); break;
            case 4: out = criterion4(); break;
            case 5: out = criterion5(); break;
            case 6: out = criterion6(); break;
            case 7: out = criterion7(); break;
            case 8: out = criterion8(); break;
        }
        out.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char* verdict = out.skipped ? "SKIP" : out.passed ? "PASS" : "FAIL";
        std::printf("[%s] criterion %d: %s  (%.1f s)\n\n", verdict, out.criterion,
                    out.detail.c_str(), out.seconds);
        std::fflush(stdout);
        outcomes.push_back(out);
    }

    int failed = 0;
    for (const Outcome& out : outcomes)
        if (out.ran && !out.passed && !out.skipped) ++failed;
    std::printf("acceptance summary: %zu criteria run, %d failed\n", outcomes.size(), failed);
    return failed == 0 ? 0 : 1;
}
