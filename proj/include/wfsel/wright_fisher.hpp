#pragma once

#include <cstdint>
#include <vector>

namespace wfsel {

// Selection strengths are clamped to this range at every public entry
// point; fitted values on real data stay well inside it.
constexpr double kMaxSelStrength = 5.0;

// Largest population size for which exact transition distributions are
// computed (an (N+1)-state chain; beyond this the matrix iteration is
// impractical and the Beta-with-spikes path should be used instead).
constexpr int kMaxExactPopsize = 2000;

// Evolutionary parameters: effective population size N (> 0, need not be
// an integer except for simulation) and per-generation selection
// strength s.
struct WfParams {
    double popsize = 1.0;
    double selstrength = 0.0;

    WfParams() = default;
    WfParams(double n, double s);
};

// The N+1 frequencies i/N for i = 0..N.
struct FrequencyGrid {
    int popsize = 1;

    explicit FrequencyGrid(int n);
    int size() const { return popsize + 1; }
    double freq(int i) const { return static_cast<double>(i) / popsize; }
};

// A probability distribution over a FrequencyGrid.
struct DiscreteDistribution {
    FrequencyGrid grid;
    std::vector<double> mass;

    double mean() const;
    double variance() const;
};

// Offspring probability g(x, s): the chance that an individual in the
// next generation descends from the focal variant when its current
// frequency is x.  g(0,s) = 0 and g(1,s) = 1 exactly for any s.
double selection_kernel(double x, double s);

// One generation: Binomial(N, g(x_t, s)) / N.  x_t may be any frequency
// in [0, 1]; the resulting distribution lives on the N-grid.
DiscreteDistribution one_step_transition(double x_t, const WfParams& params);

// k generations, computed by iterating the one-step transition exactly.
// Requires an integer population size <= kMaxExactPopsize.
DiscreteDistribution exact_k_step_transition(double x_0, const WfParams& params, int k);

// Simulated trajectory of length generations+1 starting at x_0.  Each
// step draws Binomial(N, g)/N with N = round(popsize).  Deterministic
// for a fixed seed.
std::vector<double> simulate_trajectory(double x_0, const WfParams& params,
                                        int generations, std::uint64_t seed);

}  // namespace wfsel
