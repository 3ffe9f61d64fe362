#pragma once

// Closed-loop simulation and decay-law fitting.
//
// Between samples the loop runs open with the held input, so the exact
// intersample state is
//
//   x(k tau + s) = T(s) x(k tau) + S(s) u_k,   u_k = f . x(k tau),
//
// with T(s) the diagonal semigroup sample and S(s) the hold map of width s.
// Sample points are marched with the one-period operator Delta(tau); the
// two views agree at every k tau by construction and the tests pin that.
//
// Decay laws are fitted in log space:
//
//   PurePower:    log ||x|| ~ log A - p log t          (A, p free)
//   PowerSqrtLog: log ||x|| ~ log A - (1/2) log t + (1/2) log log t
//                                                      (A free, p fixed 1/2)
//
// the second being the boundary envelope sqrt(log t / t).

#include <cstddef>
#include <optional>
#include <vector>

#include "rieszlab/operator_engine.hpp"

namespace rieszlab {

struct Trajectory {
    std::vector<double> times;
    std::vector<double> norms;
    double x0_delta_class = 0.0; // largest delta <= alpha/2 with finite dnorm
};

// Exact ZOH simulation to t_end with `substeps` intersample points per
// period (substeps = 1 records sample points only).  tau and t_end must be
// positive, substeps >= 1, x0 must match the system size.
Trajectory simulate_closed_loop(const TruncatedSystem& sys, double tau, const StateVec& x0,
                                double t_end, std::size_t substeps);

enum class DecayModel { PurePower, PowerSqrtLog };

struct DecayFit {
    DecayModel model = DecayModel::PurePower;
    double exponent = 0.0;  // p (fixed 0.5 for PowerSqrtLog)
    double amplitude = 0.0; // A
    double t_lo = 0.0, t_hi = 0.0;
    double rms_residual = 0.0;
    std::size_t points = 0;
    std::size_t zero_norms_excluded = 0;
    bool non_decaying = false; // PurePower fit with p < 0.01
};

// Fit over an explicit time window.  Zero norms inside the window are
// excluded and counted (ZeroNorms if nothing remains); at least 30 usable
// points are required (InsufficientData).  PowerSqrtLog additionally only
// uses points with t > 1.
DecayFit fit_decay_window(const Trajectory& traj, DecayModel model, double t_lo, double t_hi);

// Default window: the trailing `window_fraction` of the log-time span of the
// positive-time samples.
DecayFit fit_decay(const Trajectory& traj, DecayModel model, double window_fraction = 0.5);

struct EquivalenceReport {
    double exponent_sampled = 0.0; // fit through sample points only
    double exponent_full = 0.0;    // fit through the intersample trajectory
    double diff = 0.0;
    bool agree = false; // |diff| <= 0.02
};

// Fits the sampled subsequence ||x(k tau)|| against the full intersample
// trajectory; the sampled-data rate transfers to continuous time exactly
// when the two exponents agree.
EquivalenceReport equivalence_check(const TruncatedSystem& sys, double tau, const StateVec& x0,
                                    double t_end, std::size_t substeps);

} // namespace rieszlab
