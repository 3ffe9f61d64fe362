#include "rieszlab/decay_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rieszlab {

Trajectory simulate_closed_loop(const TruncatedSystem& sys, double tau, const StateVec& x0,
                                double t_end, std::size_t substeps) {
    if (!(tau > 0.0)) throw std::invalid_argument("simulate_closed_loop: tau must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("simulate_closed_loop: t_end must be positive");
    if (substeps == 0) throw std::invalid_argument("simulate_closed_loop: substeps must be >= 1");
    if (x0.size() != sys.modes.size())
        throw LengthMismatch("simulate_closed_loop: state length does not match mode count");

    const std::size_t N = sys.modes.size();
    const SampledOperator op = make_sampled(sys, tau);

    // Intersample offsets are a fixed grid, so their semigroup samples and
    // hold maps are precomputed once; offset 0 reproduces the sample point.
    std::vector<std::vector<Complex>> seg_diag(substeps), seg_hold(substeps);
    for (std::size_t i = 0; i < substeps; ++i) {
        const double s = tau * static_cast<double>(i) / static_cast<double>(substeps);
        seg_diag[i].resize(N);
        seg_hold[i].resize(N);
        for (std::size_t n = 0; n < N; ++n) {
            seg_diag[i][n] = std::exp(s * sys.modes[n].lambda);
            seg_hold[i][n] = sys.modes[n].b_coeff * phi1(s, sys.modes[n].lambda);
        }
    }

    const std::size_t K = static_cast<std::size_t>(std::ceil(t_end / tau - 1e-12));
    Trajectory traj;
    traj.times.reserve(K * substeps + 1);
    traj.norms.reserve(K * substeps + 1);

    StateVec x = x0;
    for (std::size_t k = 0; k < K; ++k) {
        Complex u = 0.0;
        for (std::size_t n = 0; n < N; ++n) u += sys.modes[n].f_coeff * x[n];
        for (std::size_t i = 0; i < substeps; ++i) {
            double acc = 0.0;
            for (std::size_t n = 0; n < N; ++n)
                acc += std::norm(seg_diag[i][n] * x[n] + seg_hold[i][n] * u);
            traj.times.push_back(static_cast<double>(k) * tau +
                                 tau * static_cast<double>(i) / static_cast<double>(substeps));
            traj.norms.push_back(std::sqrt(acc));
        }
        for (std::size_t n = 0; n < N; ++n) x[n] = op.diag[n] * x[n] + op.s_vec[n] * u;
    }
    traj.times.push_back(static_cast<double>(K) * tau);
    traj.norms.push_back(state_norm(x));

    const double half = sys.sector.alpha / 2.0;
    traj.x0_delta_class = std::isfinite(dnorm(x0, half, sys)) ? half : 0.0;
    return traj;
}

DecayFit fit_decay_window(const Trajectory& traj, DecayModel model, double t_lo, double t_hi) {
    if (traj.times.size() != traj.norms.size())
        throw LengthMismatch("fit_decay: times and norms disagree");
    if (!(t_lo > 0.0) || !(t_hi > t_lo))
        throw std::invalid_argument("fit_decay: window must satisfy 0 < t_lo < t_hi");

    DecayFit fit;
    fit.model = model;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;

    std::vector<double> us, ys;
    std::size_t zeros = 0, in_window = 0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        if (t < t_lo || t > t_hi) continue;
        if (model == DecayModel::PowerSqrtLog && t <= 1.0) continue;
        ++in_window;
        if (traj.norms[i] == 0.0) {
            ++zeros;
            continue;
        }
        us.push_back(std::log(t));
        ys.push_back(std::log(traj.norms[i]));
    }
    fit.zero_norms_excluded = zeros;
    if (in_window > 0 && us.empty())
        throw ZeroNorms("fit_decay: every norm in the window is zero");
    if (us.size() < 30)
        throw InsufficientData("fit_decay: fewer than 30 usable points in the window");
    fit.points = us.size();

    if (model == DecayModel::PurePower) {
        // log||x|| = c - p log t, plain least squares in (c, p).
        double su = 0.0, sy = 0.0, suu = 0.0, suy = 0.0;
        const double n = static_cast<double>(us.size());
        for (std::size_t i = 0; i < us.size(); ++i) {
            su += us[i];
            sy += ys[i];
            suu += us[i] * us[i];
            suy += us[i] * ys[i];
        }
        const double slope = (n * suy - su * sy) / (n * suu - su * su);
        const double c = (sy - slope * su) / n;
        fit.exponent = -slope;
        fit.amplitude = std::exp(c);
        double rss = 0.0;
        for (std::size_t i = 0; i < us.size(); ++i) {
            const double r = ys[i] - (c + slope * us[i]);
            rss += r * r;
        }
        fit.rms_residual = std::sqrt(rss / n);
        fit.non_decaying = fit.exponent < 0.01;
    } else {
        // log||x|| = c - (1/2) log t + (1/2) log log t; only c is free.
        double c = 0.0;
        for (std::size_t i = 0; i < us.size(); ++i)
            c += ys[i] + 0.5 * us[i] - 0.5 * std::log(us[i]);
        c /= static_cast<double>(us.size());
        fit.exponent = 0.5;
        fit.amplitude = std::exp(c);
        double rss = 0.0;
        for (std::size_t i = 0; i < us.size(); ++i) {
            const double r = ys[i] - (c - 0.5 * us[i] + 0.5 * std::log(us[i]));
            rss += r * r;
        }
        fit.rms_residual = std::sqrt(rss / static_cast<double>(us.size()));
    }
    return fit;
}

DecayFit fit_decay(const Trajectory& traj, DecayModel model, double window_fraction) {
    if (!(window_fraction > 0.0) || window_fraction > 1.0)
        throw std::invalid_argument("fit_decay: window_fraction must lie in (0, 1]");
    double t_min = std::numeric_limits<double>::infinity();
    double t_max = -std::numeric_limits<double>::infinity();
    for (double t : traj.times) {
        if (t <= 0.0) continue;
        t_min = std::min(t_min, t);
        t_max = std::max(t_max, t);
    }
    if (!(t_max > t_min)) throw InsufficientData("fit_decay: no positive-time span to fit");
    const double lo = std::exp(std::log(t_min) +
                               (1.0 - window_fraction) * (std::log(t_max) - std::log(t_min)));
    return fit_decay_window(traj, model, lo, t_max);
}

EquivalenceReport equivalence_check(const TruncatedSystem& sys, double tau, const StateVec& x0,
                                    double t_end, std::size_t substeps) {
    if (substeps < 2)
        throw std::invalid_argument("equivalence_check: needs substeps >= 2 to compare");
    const Trajectory full = simulate_closed_loop(sys, tau, x0, t_end, substeps);

    Trajectory sampled;
    sampled.x0_delta_class = full.x0_delta_class;
    for (std::size_t i = 0; i < full.times.size(); i += substeps) {
        sampled.times.push_back(full.times[i]);
        sampled.norms.push_back(full.norms[i]);
    }

    EquivalenceReport rep;
    rep.exponent_sampled = fit_decay(sampled, DecayModel::PurePower).exponent;
    rep.exponent_full = fit_decay(full, DecayModel::PurePower).exponent;
    rep.diff = std::abs(rep.exponent_sampled - rep.exponent_full);
    rep.agree = rep.diff <= 0.02;
    return rep;
}

} // namespace rieszlab
