#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "wfsel/changepoint.hpp"
#include "wfsel/rng.hpp"

using namespace wfsel;

namespace {

// Two-regime fixture: s flips sign at switch_gen.  One observation per
// generation step of `dt` time units.
TimeSeries two_regime(double x0, double n, double s1, double s2, int gens,
                      int switch_gen, double dt, std::uint64_t seed) {
    TimeSeries s;
    s.label = "step";
    std::vector<double> first = simulate_trajectory(x0, WfParams(n, s1), switch_gen, seed);
    std::vector<double> second =
        simulate_trajectory(first.back(), WfParams(n, s2), gens - switch_gen,
                            derive_seed(seed, 1));
    for (int t = 0; t <= gens; ++t) {
        double x = t <= switch_gen ? first[t] : second[t - switch_gen];
        s.points.push_back({t * dt, x, {}});
    }
    return s;
}

TimeSeries drift_fixture(double x0, double n, int gens, double dt, std::uint64_t seed) {
    TimeSeries s;
    s.label = "drift";
    std::vector<double> traj = simulate_trajectory(x0, WfParams(n, 0.0), gens, seed);
    for (int t = 0; t <= gens; ++t) s.points.push_back({t * dt, traj[t], {}});
    return s;
}

}  // namespace

TEST_CASE("fit_split rejects bad split times and short segments") {
    TimeSeries s = drift_fixture(0.5, 500, 8, 5.0, 1);
    CHECK_THROWS_AS(fit_split(s, -10.0, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_split(s, 1000.0, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_split(s, 7.5, 5.0), std::invalid_argument);   // 2 points left
    CHECK_THROWS_AS(fit_split(s, 10.0, 5.0), std::invalid_argument);  // on an observation
    CHECK_NOTHROW(fit_split(s, 12.5, 5.0));
}

TEST_CASE("fit_split covers every transition exactly once") {
    TimeSeries s = drift_fixture(0.4, 300, 9, 1.0, 2);
    FitOutcome whole = fit(s, 1.0);
    SplitFit sf = fit_split(s, 4.5, 1.0, whole.params);
    // the split chains share observation 4: left 0..4, right 4..9
    CHECK(sf.loglik() >= whole.loglik - 1e-9);
}

TEST_CASE("six points admit exactly one split candidate") {
    TimeSeries s = drift_fixture(0.5, 400, 5, 5.0, 3);
    ChangePointNode node = scan_split(s, 5.0);
    REQUIRE(node.split.has_value());
    CHECK(node.split->split_time == doctest::Approx(12.5));  // between obs 3 and 4
    CHECK(node.lambda_split >= 0.0);
}

TEST_CASE("scan locates a strong selection flip") {
    // s: +0.2 then -0.2, switch at generation 20 of 40, 5-unit spacing.
    TimeSeries s = two_regime(0.15, 1000, 0.2, -0.2, 40, 20, 5.0, 99);
    ChangePointNode node = scan_split(s, 5.0);
    REQUIRE(node.split.has_value());
    CHECK(std::fabs(node.split->split_time - 100.0) <= 10.0);  // within 2 intervals
    CHECK(node.split->before.selstrength > 0.0);
    CHECK(node.split->after.selstrength < 0.0);
    CHECK(node.lambda_split > 10.0);
}

TEST_CASE("split likelihood never falls below the constant fit") {
    for (int rep = 0; rep < 4; ++rep) {
        TimeSeries s = drift_fixture(0.35, 250, 12, 5.0, 1000 + rep);
        ChangePointNode node = scan_split(s, 5.0);
        CHECK(node.split->loglik() >= node.loglik_const - 1e-9);
    }
}

TEST_CASE("scan behaves symmetrically on a time-reversed fixture") {
    TimeSeries s = two_regime(0.15, 2000, 0.25, -0.25, 30, 15, 5.0, 2024);
    ChangePointNode fwd = scan_split(s, 5.0);

    TimeSeries rev;
    rev.label = "rev";
    double t_end = s.points.back().time;
    for (int i = s.size() - 1; i >= 0; --i)
        rev.points.push_back({t_end - s.points[i].time, s.points[i].freq, {}});
    ChangePointNode bwd = scan_split(rev, 5.0);

    double bwd_time_in_fwd = t_end - bwd.split->split_time;
    CHECK(std::fabs(bwd_time_in_fwd - fwd.split->split_time) <= 10.0);
    // the fitted regimes swap roles under s -> -s
    CHECK(bwd.split->before.selstrength * fwd.split->after.selstrength < 0.0);
    CHECK(bwd.split->after.selstrength * fwd.split->before.selstrength < 0.0);
}

TEST_CASE("changepoint p-value: determinism and power on a seeded fixture") {
    TimeSeries s = two_regime(0.15, 1000, 0.2, -0.2, 40, 20, 5.0, 31337);
    ChangePointNode a = changepoint_p_value(s, 5.0, 49, 5);
    ChangePointNode b = changepoint_p_value(s, 5.0, 49, 5);
    REQUIRE(a.p_value.has_value());
    CHECK(*a.p_value == *b.p_value);
    CHECK(*a.p_value <= 0.02);  // 1/(49+1): no replicate beats the real flip

    ChangePointNode none = changepoint_p_value(s, 5.0, 0, 5);
    CHECK_FALSE(none.p_value.has_value());
}

TEST_CASE("recursive detection: drift stays a leaf, a flip splits") {
    TimeSeries drift = drift_fixture(0.4, 500, 24, 5.0, 140);
    ChangePointNode leaf = recursive_detect(drift, 5.0, 0.05, 29, 2, 11);
    CHECK_FALSE(leaf.significant);
    CHECK(leaf.children.empty());
    CHECK(significant_splits(leaf).empty());

    TimeSeries step = two_regime(0.15, 1000, 0.2, -0.2, 40, 20, 5.0, 31337);
    ChangePointNode tree = recursive_detect(step, 5.0, 0.05, 49, 2, 11);
    std::vector<double> splits = significant_splits(tree);
    REQUIRE(!splits.empty());
    CHECK(std::fabs(splits.front() - 100.0) <= 10.0);

    // determinism of the whole tree output
    ChangePointNode tree2 = recursive_detect(step, 5.0, 0.05, 49, 2, 11);
    CHECK(significant_splits(tree2) == splits);
}

TEST_CASE("scan_split needs six observations") {
    TimeSeries s = drift_fixture(0.5, 100, 4, 1.0, 3);  // five points
    CHECK_THROWS_AS(scan_split(s, 1.0), std::invalid_argument);
}
