#include "wfsel/stats.hpp"

#include <cmath>
#include <stdexcept>

#include "wfsel/beta_spikes.hpp"
#include "wfsel/special.hpp"
#include "wfsel/wright_fisher.hpp"

namespace wfsel {

std::string to_string(RegionClass c) {
    switch (c) {
        case RegionClass::irregularising: return "irregularising";
        case RegionClass::inconclusive: return "inconclusive";
        case RegionClass::non_irregularising: return "non_irregularising";
    }
    return "?";
}

EllipseSummary ellipse_from_fits(const std::string& label,
                                 const std::vector<std::pair<double, double>>& s_p_pairs) {
    if (s_p_pairs.empty())
        throw std::invalid_argument("ellipse_from_fits: need at least one (s, p) pair");

    EllipseSummary e;
    e.label = label;
    e.n_binnings = static_cast<int>(s_p_pairs.size());
    const double n = static_cast<double>(s_p_pairs.size());
    for (const auto& [s, p] : s_p_pairs) {
        e.center_s += s / n;
        e.center_indicator += (1.0 - p) / n;
    }
    if (s_p_pairs.size() < 2) return e;  // degenerate zero-axis ellipse

    double css = 0.0, cii = 0.0, csi = 0.0;
    for (const auto& [s, p] : s_p_pairs) {
        double ds = s - e.center_s;
        double di = (1.0 - p) - e.center_indicator;
        css += ds * ds;
        cii += di * di;
        csi += ds * di;
    }
    css /= n - 1.0;
    cii /= n - 1.0;
    csi /= n - 1.0;

    // closed-form eigendecomposition of the 2x2 covariance
    double half_tr = 0.5 * (css + cii);
    double disc = std::sqrt(0.25 * (css - cii) * (css - cii) + csi * csi);
    double l1 = half_tr + disc;
    double l2 = std::max(0.0, half_tr - disc);
    e.axis_major = std::sqrt(std::max(0.0, l1));
    e.axis_minor = std::sqrt(l2);
    if (csi == 0.0) {
        e.angle = css >= cii ? 0.0 : M_PI / 2.0;
    } else {
        e.angle = std::atan2(l1 - css, csi);
    }
    return e;
}

RegionClass classify_region(const EllipseSummary& e, double p_threshold) {
    // axis-aligned bounding extent of the rotated ellipse
    double cs = std::cos(e.angle), sn = std::sin(e.angle);
    double half_w = std::sqrt(std::pow(e.axis_major * cs, 2) + std::pow(e.axis_minor * sn, 2));
    double half_h = std::sqrt(std::pow(e.axis_major * sn, 2) + std::pow(e.axis_minor * cs, 2));
    double ind_cut = 1.0 - p_threshold;

    bool inside = (e.center_s - half_w > 0.0) && (e.center_indicator - half_h > ind_cut);
    if (inside) return RegionClass::irregularising;
    bool outside = (e.center_s + half_w <= 0.0) || (e.center_indicator + half_h <= ind_cut);
    if (outside) return RegionClass::non_irregularising;
    return RegionClass::inconclusive;
}

GTestResult g_test(const ContingencyTable& table) {
    const auto& focal = table.counts[0];
    const auto& base = table.counts[1];
    long long n_focal = 0, n_base = 0;
    for (int j = 0; j < 3; ++j) {
        if (focal[j] < 0 || base[j] < 0)
            throw std::invalid_argument("g_test: negative count");
        n_focal += focal[j];
        n_base += base[j];
    }
    if (n_focal == 0 || n_base == 0)
        throw std::invalid_argument("g_test: empty row");
    for (int j = 0; j < 3; ++j)
        if (focal[j] + base[j] == 0)
            throw std::invalid_argument("g_test: empty column");

    GTestResult r;
    r.dof = 2;
    for (int j = 0; j < 3; ++j) {
        if (focal[j] == 0) continue;  // O = 0 contributes nothing
        if (base[j] == 0)
            throw std::invalid_argument("g_test: observed count with zero expected count");
        double expected = static_cast<double>(n_focal) * static_cast<double>(base[j]) /
                          static_cast<double>(n_base);
        r.g += 2.0 * static_cast<double>(focal[j]) *
               std::log(static_cast<double>(focal[j]) / expected);
    }
    r.g = std::max(0.0, r.g);
    r.p = chi2_survival(r.g, r.dof);
    return r;
}

std::vector<SweepRow> distance_sweep(double popsize, const std::vector<double>& s_values,
                                     int k, const std::vector<double>& x0_grid) {
    long long n = std::llround(popsize);
    if (n < 1 || n > kMaxExactPopsize)
        throw std::invalid_argument("distance_sweep: popsize must be in [1, 2000]");

    std::vector<SweepRow> rows;
    rows.reserve(s_values.size() * x0_grid.size());
    for (double s : s_values) {
        WfParams params(static_cast<double>(n), s);
        for (double x0 : x0_grid) {
            DiscreteDistribution exact = exact_k_step_transition(x0, params, k);
            BwsTransition bws = bws_k_step(x0, params, k);
            double mu, var;
            normal_moments(x0, params, k, mu, var);
            SweepRow row;
            row.x0 = x0;
            row.s = s;
            row.tv_bws = statistical_distance(discretize_bws(bws, static_cast<int>(n)), exact);
            row.tv_normal =
                statistical_distance(discretize_normal(mu, var, static_cast<int>(n)), exact);
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace wfsel
