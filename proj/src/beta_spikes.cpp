#include "wfsel/beta_spikes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "wfsel/special.hpp"

namespace wfsel {

namespace {

// 64-point Gauss-Legendre nodes/weights on (0, 1), generated once by
// Newton iteration on the Legendre polynomial.
struct Gauss64 {
    std::array<double, 64> x{};
    std::array<double, 64> w{};

    Gauss64() {
        const int n = 64;
        for (int i = 0; i < n; ++i) {
            // nodes on (-1, 1)
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (z * p0 - p1) / (z * z - 1.0);
                double dz = p0 / pp;
                z -= dz;
                if (std::fabs(dz) < 1e-15) break;
            }
            x[i] = 0.5 * (1.0 - z);  // map to (0,1), ascending later
            w[i] = 1.0 / ((1.0 - z * z) * pp * pp);
        }
    }
};

const Gauss64& gauss64() {
    static const Gauss64 g;
    return g;
}

// Exponents below this get a power substitution; above, the density is
// smooth enough for a plain panel.
constexpr double kSubstitutionExponent = 1.5;

void logsumexp_normalize(std::vector<double>& logw) {
    double mx = -INFINITY;
    for (double v : logw) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : logw) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : logw) v /= sum;
}

}  // namespace

BetaQuadrature beta_quadrature(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("beta_quadrature: shape parameters must be positive");
    const Gauss64& gl = gauss64();
    const double m = alpha / (alpha + beta);
    const double sd = std::sqrt(m * (1.0 - m) / (alpha + beta + 1.0));

    BetaQuadrature q;
    std::vector<double> logw;
    q.x.reserve(128);
    logw.reserve(128);

    auto plain = [&](double lo, double hi) {
        if (hi <= lo) return;
        for (int i = 0; i < 64; ++i) {
            double x = lo + (hi - lo) * gl.x[i];
            q.x.push_back(x);
            logw.push_back(std::log((hi - lo) * gl.w[i]) +
                           (alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x));
        }
    };
    // t = (x/c)^alpha absorbs the x^{alpha-1} factor exactly.
    auto sub_left = [&](double c) {
        for (int i = 0; i < 64; ++i) {
            double x = c * std::pow(gl.x[i], 1.0 / alpha);
            q.x.push_back(x);
            logw.push_back(std::log(gl.w[i]) + alpha * std::log(c) - std::log(alpha) +
                           (beta - 1.0) * std::log1p(-x));
        }
    };
    auto sub_right = [&](double c) {
        for (int i = 0; i < 64; ++i) {
            double x = 1.0 - (1.0 - c) * std::pow(gl.x[i], 1.0 / beta);
            q.x.push_back(x);
            logw.push_back(std::log(gl.w[i]) + beta * std::log1p(-c) - std::log(beta) +
                           (alpha - 1.0) * std::log(x));
        }
    };

    const double lo = alpha < kSubstitutionExponent ? 0.0
                    : alpha >= 2.0 ? std::max(1e-12, m - 16.0 * sd) : 1e-12;
    const double hi = beta < kSubstitutionExponent ? 1.0
                    : beta >= 2.0 ? std::min(1.0 - 1e-12, m + 16.0 * sd) : 1.0 - 1e-12;

    if (alpha >= kSubstitutionExponent && beta >= kSubstitutionExponent) {
        plain(lo, hi);
    } else if (alpha < kSubstitutionExponent && beta < kSubstitutionExponent) {
        double c = std::clamp(m, 0.02, 0.98);
        sub_left(c);
        sub_right(c);
    } else if (alpha < kSubstitutionExponent) {
        double c = std::min({0.98, std::max(40.0 * m, 1e-8), hi});
        sub_left(c);
        plain(c, hi);
    } else {
        double c = std::max({0.02, 1.0 - std::max(40.0 * (1.0 - m), 1e-8), lo});
        plain(lo, c);
        sub_right(c);
    }

    logsumexp_normalize(logw);
    q.w = std::move(logw);
    return q;
}

void beta_from_moments(double mean, double variance, double& alpha, double& beta) {
    if (!(mean > 0.0) || !(mean < 1.0))
        throw std::invalid_argument("beta_from_moments: mean must lie in (0, 1)");
    double cap = mean * (1.0 - mean);
    variance = std::clamp(variance, cap / (1.0 + kMaxBetaConcentration), cap * (1.0 - 1e-12));
    double r = cap / variance - 1.0;
    alpha = mean * r;
    beta = (1.0 - mean) * r;
}

namespace {

struct GenerationExpectations {
    double e_g = 0.0;    // E[g]
    double e_g1g = 0.0;  // E[g(1-g)]
    double var_g = 0.0;  // Var[g]
    double q0 = 0.0;     // E[(1-g)^N]
    double q1 = 0.0;     // E[g^N]
    double denom = 1.0;  // 1 - q0 - q1, kept precise when one spike dominates
};

GenerationExpectations point_expectations(double x, const WfParams& params) {
    GenerationExpectations e;
    double g = selection_kernel(x, params.selstrength);
    double n = params.popsize;
    e.e_g = g;
    e.e_g1g = g * (1.0 - g);
    e.var_g = 0.0;
    double t0 = g < 1.0 ? n * std::log1p(-g) : -INFINITY;
    double t1 = g > 0.0 ? n * std::log(g) : -INFINITY;
    e.q0 = std::exp(t0);
    e.q1 = std::exp(t1);
    if (e.q1 < 1e-30)
        e.denom = -std::expm1(t0) - e.q1;
    else if (e.q0 < 1e-30)
        e.denom = -std::expm1(t1) - e.q0;
    else
        e.denom = 1.0 - e.q0 - e.q1;
    return e;
}

GenerationExpectations beta_expectations(double alpha, double beta, const WfParams& params) {
    GenerationExpectations e;
    BetaQuadrature q = beta_quadrature(alpha, beta);
    const double n = params.popsize;
    const double s = params.selstrength;
    const double es = std::exp(-s);
    const size_t cnt = q.x.size();

    std::vector<double> g(cnt);
    for (size_t i = 0; i < cnt; ++i) {
        double x = q.x[i];
        g[i] = s == 0.0 ? x : x / (x + (1.0 - x) * es);
    }
    for (size_t i = 0; i < cnt; ++i) {
        double w = q.w[i], gi = g[i];
        e.e_g += w * gi;
        e.e_g1g += w * gi * (1.0 - gi);
        e.q0 += gi < 1.0 ? w * std::exp(n * std::log1p(-gi)) : 0.0;
        e.q1 += gi > 0.0 ? w * std::exp(n * std::log(gi)) : 0.0;
    }
    for (size_t i = 0; i < cnt; ++i) {
        double d = g[i] - e.e_g;
        e.var_g += q.w[i] * d * d;
    }
    e.denom = 1.0 - e.q0 - e.q1;
    return e;
}

}  // namespace

MomentState propagate_one_generation(const MomentState& state, const WfParams& params) {
    if (state.absorbed()) return state;

    const double n = params.popsize;
    const double live = 1.0 - state.p0 - state.p1;
    const double cap = state.mean * (1.0 - state.mean);

    GenerationExpectations e =
        (state.variance <= cap / (1.0 + kMaxBetaConcentration))
            ? point_expectations(state.mean, params)
            : [&] {
                  double a, b;
                  beta_from_moments(state.mean, state.variance, a, b);
                  return beta_expectations(a, b, params);
              }();

    MomentState next;
    next.p0 = state.p0 + live * e.q0;
    next.p1 = state.p1 + live * e.q1;

    // Renormalize the law-of-total-variance moments to the component that
    // is still unabsorbed after this generation.
    double denom = e.denom;
    if (denom < 1e-300 || next.absorbed()) {
        next.mean = state.mean;
        next.variance = state.variance;
        return next;
    }
    double mean = (e.e_g - e.q1) / denom;
    double m2 = (e.e_g1g / n + e.var_g + e.e_g * e.e_g - e.q1) / denom;
    double var = m2 - mean * mean;

    mean = std::clamp(mean, 1e-12, 1.0 - 1e-12);
    double vcap = mean * (1.0 - mean);
    next.mean = mean;
    next.variance = std::clamp(var, vcap / (1.0 + kMaxBetaConcentration), vcap * (1.0 - 1e-12));
    return next;
}

BwsTransition bws_k_step(double x_0, const WfParams& params, int k) {
    if (x_0 < 0.0 || x_0 > 1.0)
        throw std::domain_error("bws_k_step: frequency outside [0, 1]");
    if (k < 1) throw std::invalid_argument("bws_k_step: k must be >= 1");

    BwsTransition trans;
    trans.k = k;
    if (x_0 <= kBoundaryEps) {
        trans.p0 = 1.0;
        return trans;
    }
    if (x_0 >= 1.0 - kBoundaryEps) {
        trans.p1 = 1.0;
        return trans;
    }

    MomentState state{0.0, 0.0, x_0, 0.0};
    for (int step = 0; step < k; ++step) state = propagate_one_generation(state, params);

    trans.p0 = state.p0;
    trans.p1 = state.p1;
    if (!state.absorbed())
        beta_from_moments(state.mean, state.variance, trans.alpha, trans.beta_param);
    return trans;
}

double bws_log_density(const BwsTransition& trans, double x) {
    if (x < 0.0 || x > 1.0)
        throw std::domain_error("bws_log_density: frequency outside [0, 1]");
    if (x <= kBoundaryEps) return std::log(std::max(trans.p0, kDensityFloor));
    if (x >= 1.0 - kBoundaryEps) return std::log(std::max(trans.p1, kDensityFloor));
    double live = trans.live_mass();
    if (live <= kDensityFloor) return std::log(kDensityFloor);
    return std::log(live) + beta_log_pdf(x, trans.alpha, trans.beta_param);
}

void normal_moments(double x_0, const WfParams& params, int k, double& mu, double& var) {
    if (x_0 < 0.0 || x_0 > 1.0)
        throw std::domain_error("normal_moments: frequency outside [0, 1]");
    if (k < 1) throw std::invalid_argument("normal_moments: k must be >= 1");
    if (x_0 <= kBoundaryEps || x_0 >= 1.0 - kBoundaryEps) {
        mu = x_0 <= kBoundaryEps ? 0.0 : 1.0;
        var = 0.0;
        return;
    }
    MomentState state{0.0, 0.0, x_0, 0.0};
    for (int step = 0; step < k; ++step) state = propagate_one_generation(state, params);
    double live = 1.0 - state.p0 - state.p1;
    mu = state.p1 + live * state.mean;
    double m2 = state.p1 + live * (state.variance + state.mean * state.mean);
    var = std::max(0.0, m2 - mu * mu);
}

double normal_log_density(double x_0, const WfParams& params, int k, double x) {
    double mu, var;
    normal_moments(x_0, params, k, mu, var);
    if (var <= kDensityFloor) {
        return std::fabs(x - mu) < kBoundaryEps ? std::log(1.0 / kDensityFloor)
                                                : std::log(kDensityFloor);
    }
    return -0.5 * std::log(2.0 * M_PI * var) - 0.5 * (x - mu) * (x - mu) / var;
}

namespace {

// Integral of Beta(a, b) over [lo, hi] by a 24-point panel; end cells
// with a singular exponent get the power substitution.
double beta_cell_mass(double a, double b, double lo, double hi) {
    const Gauss64& gl = gauss64();
    const double lb = log_beta(a, b);
    double sum = 0.0;
    if (lo <= 0.0 && a < 1.0) {
        // t = (x/hi)^a
        for (int i = 0; i < 64; ++i) {
            double x = hi * std::pow(gl.x[i], 1.0 / a);
            sum += gl.w[i] * std::exp(a * std::log(hi) - std::log(a) +
                                      (b - 1.0) * std::log1p(-x) - lb);
        }
        return sum;
    }
    if (hi >= 1.0 && b < 1.0) {
        for (int i = 0; i < 64; ++i) {
            double x = 1.0 - (1.0 - lo) * std::pow(gl.x[i], 1.0 / b);
            sum += gl.w[i] * std::exp(b * std::log1p(-lo) - std::log(b) +
                                      (a - 1.0) * std::log(x) - lb);
        }
        return sum;
    }
    double u = std::max(lo, 0.0), v = std::min(hi, 1.0);
    if (v <= u) return 0.0;
    for (int i = 0; i < 64; ++i) {
        double x = u + (v - u) * gl.x[i];
        sum += (v - u) * gl.w[i] * std::exp(beta_log_pdf(x, a, b));
    }
    return sum;
}

}  // namespace

DiscreteDistribution discretize_bws(const BwsTransition& trans, int popsize) {
    FrequencyGrid grid(popsize);
    DiscreteDistribution dist{grid, std::vector<double>(grid.size(), 0.0)};
    double live = trans.live_mass();
    if (live > 0.0) {
        double h = 0.5 / popsize;
        for (int i = 0; i <= popsize; ++i) {
            double lo = grid.freq(i) - h, hi = grid.freq(i) + h;
            dist.mass[i] = live * beta_cell_mass(trans.alpha, trans.beta_param, lo, hi);
        }
    }
    dist.mass[0] += trans.p0;
    dist.mass[popsize] += trans.p1;
    return dist;
}

DiscreteDistribution discretize_normal(double mu, double var, int popsize) {
    FrequencyGrid grid(popsize);
    DiscreteDistribution dist{grid, std::vector<double>(grid.size(), 0.0)};
    double h = 0.5 / popsize;
    if (var <= 0.0) {
        int cell = std::clamp(static_cast<int>(std::floor((mu + h) * popsize)), 0, popsize);
        dist.mass[cell] = 1.0;
        return dist;
    }
    double sd = std::sqrt(var);
    double prev = 0.0;  // CDF at -inf
    for (int i = 0; i <= popsize; ++i) {
        double upper = i < popsize ? normal_cdf((grid.freq(i) + h - mu) / sd) : 1.0;
        dist.mass[i] = upper - prev;
        prev = upper;
    }
    return dist;
}

double statistical_distance(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    if (a.grid.popsize != b.grid.popsize)
        throw std::invalid_argument("statistical_distance: grids do not match");
    double sum = 0.0;
    for (size_t i = 0; i < a.mass.size(); ++i) sum += std::fabs(a.mass[i] - b.mass[i]);
    return 0.5 * sum;
}

}  // namespace wfsel
