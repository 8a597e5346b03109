#pragma once

#include <vector>

#include "wfsel/wright_fisher.hpp"

namespace wfsel {

// Observations this close to 0 or 1 are scored against the boundary
// spikes rather than the continuous component.
constexpr double kBoundaryEps = 1e-9;

// Cap on alpha+beta: when the propagated variance underflows the Beta
// component collapses to a quadrature-safe near-point mass.
constexpr double kMaxBetaConcentration = 1e8;

// Floor used instead of -inf when a log of zero mass is requested.
constexpr double kDensityFloor = 1e-300;

// Beta-with-spikes transition after k generations: point masses at 0
// (extinction) and 1 (fixation) plus a Beta(alpha, beta) continuous
// component carrying the non-absorbed probability.
struct BwsTransition {
    double p0 = 0.0;
    double p1 = 0.0;
    double alpha = 1.0;
    double beta_param = 1.0;
    int k = 0;

    double live_mass() const { return 1.0 - p0 - p1; }
};

// State carried between generations: absorbed masses plus mean/variance
// of the non-absorbed component.  variance == 0 denotes a point mass.
struct MomentState {
    double p0 = 0.0;
    double p1 = 0.0;
    double mean = 0.5;
    double variance = 0.0;

    bool absorbed() const { return 1.0 - p0 - p1 < 1e-12; }
};

// Fixed-order Gauss-Legendre rule (64 nodes per panel) adapted to a
// Beta(alpha, beta) weight: nodes in (0, 1) with weights normalized to
// sum to one, so expectations are plain dot products.  Endpoint
// singularities (exponent < 1.5) are absorbed by power substitutions;
// concentrated shapes get a window around the mean.
struct BetaQuadrature {
    std::vector<double> x;
    std::vector<double> w;
};

BetaQuadrature beta_quadrature(double alpha, double beta);

// Moment-matched Beta parameters for a (mean, variance) pair, with the
// concentration cap applied.
void beta_from_moments(double mean, double variance, double& alpha, double& beta);

// Advance the state one Wright-Fisher generation.  Absorbed states pass
// through unchanged.  Expectations over the incoming Beta component use
// beta_quadrature; a point-mass state is evaluated exactly.
MomentState propagate_one_generation(const MomentState& state, const WfParams& params);

// k-generation transition from a point mass at x_0.
BwsTransition bws_k_step(double x_0, const WfParams& params, int k);

// Log density of the transition at x.  Boundary observations read the
// spikes; interior ones the weighted Beta density.  Returns
// log(kDensityFloor) instead of -inf when the requested mass is zero.
double bws_log_density(const BwsTransition& trans, double x);

// Mean and total (unconditional) variance of the k-step transition,
// propagated through the same moment recursion.
void normal_moments(double x_0, const WfParams& params, int k, double& mu, double& var);

// Gaussian baseline with the same propagated mean and total variance.
double normal_log_density(double x_0, const WfParams& params, int k, double x);

// Discretizations over the exact N-grid: the approximation is integrated
// over the cells [i/N - 1/2N, i/N + 1/2N); boundary spikes (and, for the
// Gaussian, the tails) land in the end cells.
DiscreteDistribution discretize_bws(const BwsTransition& trans, int popsize);
DiscreteDistribution discretize_normal(double mu, double var, int popsize);

// Total-variation distance between two distributions on the same grid.
double statistical_distance(const DiscreteDistribution& a, const DiscreteDistribution& b);

}  // namespace wfsel
