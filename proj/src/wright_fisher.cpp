#include "wfsel/wright_fisher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wfsel/rng.hpp"
#include "wfsel/special.hpp"

namespace wfsel {

WfParams::WfParams(double n, double s) : popsize(n), selstrength(s) {
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("WfParams: popsize must be positive and finite");
    if (!std::isfinite(s))
        throw std::invalid_argument("WfParams: selstrength must be finite");
    selstrength = std::clamp(s, -kMaxSelStrength, kMaxSelStrength);
}

FrequencyGrid::FrequencyGrid(int n) : popsize(n) {
    if (n < 1) throw std::invalid_argument("FrequencyGrid: popsize must be >= 1");
}

double DiscreteDistribution::mean() const {
    double m = 0.0;
    for (int i = 0; i < grid.size(); ++i) m += mass[i] * grid.freq(i);
    return m;
}

double DiscreteDistribution::variance() const {
    double m = mean(), v = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        double d = grid.freq(i) - m;
        v += mass[i] * d * d;
    }
    return v;
}

double selection_kernel(double x, double s) {
    if (x < 0.0 || x > 1.0)
        throw std::domain_error("selection_kernel: frequency outside [0, 1]");
    if (x == 0.0 || x == 1.0) return x;  // absorbing regardless of s
    s = std::clamp(s, -kMaxSelStrength, kMaxSelStrength);
    if (s == 0.0) return x;
    // x / (x + (1-x) e^{-s}); equivalent to Eq. form but safe at small x.
    return x / (x + (1.0 - x) * std::exp(-s));
}

namespace {

int integer_popsize(const WfParams& params, int limit) {
    double n = params.popsize;
    long long ni = std::llround(n);
    if (ni < 1 || std::fabs(n - static_cast<double>(ni)) > 1e-9)
        throw std::invalid_argument("exact transition requires an integer popsize");
    if (ni > limit)
        throw std::invalid_argument("exact transition requires popsize <= 2000");
    return static_cast<int>(ni);
}

// Binomial(N, p) pmf over counts 0..N, computed through log binomial
// coefficients so large N does not overflow.
void binomial_row(int n, double p, std::vector<double>& out) {
    out.assign(n + 1, 0.0);
    if (p <= 0.0) { out[0] = 1.0; return; }
    if (p >= 1.0) { out[n] = 1.0; return; }
    const double lp = std::log(p), lq = std::log1p(-p);
    for (int j = 0; j <= n; ++j)
        out[j] = std::exp(log_choose(n, j) + j * lp + (n - j) * lq);
}

}  // namespace

DiscreteDistribution one_step_transition(double x_t, const WfParams& params) {
    if (x_t < 0.0 || x_t > 1.0)
        throw std::domain_error("one_step_transition: frequency outside [0, 1]");
    int n = integer_popsize(params, kMaxExactPopsize);
    DiscreteDistribution dist{FrequencyGrid(n), {}};
    binomial_row(n, selection_kernel(x_t, params.selstrength), dist.mass);
    return dist;
}

DiscreteDistribution exact_k_step_transition(double x_0, const WfParams& params, int k) {
    if (k < 1) throw std::invalid_argument("exact_k_step_transition: k must be >= 1");
    int n = integer_popsize(params, kMaxExactPopsize);
    DiscreteDistribution dist = one_step_transition(x_0, params);

    if (k > 1) {
        // Cache the one-step rows from each grid state and iterate the
        // distribution vector.
        std::vector<std::vector<double>> rows(n + 1);
        for (int i = 0; i <= n; ++i)
            binomial_row(n, selection_kernel(dist.grid.freq(i), params.selstrength), rows[i]);
        std::vector<double> next(n + 1);
        for (int step = 1; step < k; ++step) {
            std::fill(next.begin(), next.end(), 0.0);
            for (int i = 0; i <= n; ++i) {
                double w = dist.mass[i];
                if (w <= 0.0) continue;
                const std::vector<double>& row = rows[i];
                for (int j = 0; j <= n; ++j) next[j] += w * row[j];
            }
            dist.mass.swap(next);
        }
    }
    return dist;
}

std::vector<double> simulate_trajectory(double x_0, const WfParams& params,
                                        int generations, std::uint64_t seed) {
    if (x_0 < 0.0 || x_0 > 1.0)
        throw std::domain_error("simulate_trajectory: frequency outside [0, 1]");
    if (generations < 1)
        throw std::invalid_argument("simulate_trajectory: generations must be >= 1");
    long long n = std::llround(params.popsize);
    if (n < 1) throw std::invalid_argument("simulate_trajectory: popsize must round to >= 1");

    std::mt19937_64 rng = make_rng(seed);
    std::vector<double> traj;
    traj.reserve(generations + 1);
    traj.push_back(x_0);
    double x = x_0;
    for (int t = 0; t < generations; ++t) {
        double gp = selection_kernel(x, params.selstrength);
        long long j = 0;
        if (gp >= 1.0) {
            j = n;
        } else if (gp > 0.0) {
            std::binomial_distribution<long long> binom(n, gp);
            j = binom(rng);
        }
        x = static_cast<double>(j) / static_cast<double>(n);
        traj.push_back(x);
    }
    return traj;
}

}  // namespace wfsel
