#pragma once

// Margin certificates for the sampled closed loop.
//
// The closed loop stays structurally sound for a sampling width tau when two
// scalar functions stay away from zero:
//
//   continuous margin   eps_c = inf_{Re lambda >= 0} |1 - G(lambda)|,
//   discrete margin     eps_d = min_{|z| = 1}        |1 - H_tau(z)|,
//
// both reported after subtracting a rigorous truncation-tail deduction when
// the system carries tail data.  Since 1 - H is analytic and tends to 1 at
// infinity, its exterior modulus is controlled by the circle minimum, which
// is what the random exterior scans check empirically.
//
// The tail deduction for H uses a per-mode envelope: for stable-tail modes
// and |z| >= 1,
//
//   |(1 - e^{tau lambda})/(z - e^{tau lambda})| / |lambda|
//       <= max(upsilon1, upsilon2 |lambda|^{alpha_tilde}),
//
//   upsilon1 = max( 2 / ((1 - e^{-1}) kappa), e m1 / omega ),
//   upsilon2 = e m1 / (Upsilon kappa^{alpha_tilde - alpha}),
//
// where kappa is the smallest stable-tail |lambda_n| and m1 is the supremum
// of |(1 - e^mu)/mu| over the strip rectangle -1 <= Re mu <= 0, |Im mu| <= pi
// (the reduction mu -> mu mod 2 pi i makes the rectangle enough; the value
// is 1, attained in the mu -> 0 limit).  The companion constant
//
//   upsilon0 = max( 1/(c1 kappa_all^alpha), 1/((1 - e^{-1}) kappa_all^alpha),
//                   e/(tau omega kappa_all^alpha), e/(tau Upsilon) )
//
// bounds 1 / (|z - e^{tau lambda_n}| |lambda_n|^alpha) near the unit circle,
// with c1 the distance from the unit circle to the bad-region samples
// e^{tau lambda_n} and kappa_all the global minimum of |lambda_n|.
//
// Pole placement on the unstable part uses the diagonal rank-one structure:
// the characteristic polynomial of diag(lambda) + b f^T factors as
// p(s) - sum_j b_j f_j prod_{i != j}(s - lambda_i), so matching coefficients
// against the target polynomial is an m x m linear solve.

#include <cstddef>
#include <optional>
#include <vector>

#include "rieszlab/operator_engine.hpp"

namespace rieszlab {

struct SpectrumSplit {
    std::vector<std::size_t> unstable;   // Re lambda > 0
    std::vector<std::size_t> bad_region; // bad region incl. axis (supset of unstable)
    std::vector<std::size_t> stable;     // complement of bad_region
};

SpectrumSplit split_spectrum(const TruncatedSystem& sys);

struct BoundConstants {
    double kappa = 0.0;      // min |lambda_n| over the stable set
    double kappa_all = 0.0;  // min |lambda_n| over all modes
    double m1 = 0.0;         // rectangle supremum of |(1 - e^mu)/mu|
    double upsilon1 = 0.0;
    double upsilon2 = 0.0;
    double upsilon0 = 0.0;
    double alpha_tilde = 0.0;

    ModeBoundConstants envelope() const { return {upsilon1, upsilon2, alpha_tilde}; }
};

// Distance from the unit circle to the bad-region samples e^{tau lambda_n};
// +infinity when the bad region is empty.
double bad_region_circle_gap(const TruncatedSystem& sys, double tau);

// Computes the constants above.  Requires alpha_tilde >= sector.alpha and a
// nonempty stable set (EmptyStableTail otherwise); c1 must be positive.
BoundConstants gamma_constants(const TruncatedSystem& sys, double tau, double alpha_tilde,
                               double c1);

struct ContinuousMargin {
    double eps_c = 0.0;       // min(|1 - G| - tail) over grid, probes, infinity
    Complex argmin;           // where the minimum was attained
    bool tail_available = false;
    double tail_bound = 0.0;  // constant deduction applied on the axis
    std::size_t grid_points = 0;
};

// Scans |1 - G| along i * axis_grid, at the half-plane probes (Re >= 0
// required), and at the analytic large-|lambda| limit |1 - G| -> 1, included
// as a virtual point.  Grid points that collide with a pole are nudged by
// multiples of 1e-9 (1 + |w|) until clear.
ContinuousMargin continuous_margin(const TruncatedSystem& sys,
                                   const std::vector<double>& axis_grid,
                                   const std::vector<Complex>& probes);

struct DiscreteMargin {
    double eps_d = 0.0;      // min(|1 - H| - tail) over the circle grid
    double theta_argmin = 0.0;
    std::size_t nodes = 0;   // final grid size
    double last_change = 0.0;
    double refine_tol = 1e-4;
    bool tail_available = false;
    double tail_bound = 0.0;
};

// Minimum of |1 - H| over uniform circle grids, starting at min_nodes
// (>= 256) and doubling until the minimum moves by less than 1e-4 or the
// grid reaches 2^20 nodes.  Doubling keeps grids nested, so the reported
// minimum never increases under refinement.  Throws PoleOnCircle when some
// |d_n| = 1.  The tail deduction needs tail data, a nonempty stable set and
// beta + gamma >= alpha; otherwise the margin is truncation-only.
DiscreteMargin discrete_margin(const SampledOperator& op, const TruncatedSystem& sys,
                               std::size_t min_nodes = 256);

// Max over stable modes and |z| >= 1 samples of (per-mode value - envelope);
// certification demands a nonpositive result.
double verify_mode_bound(const TruncatedSystem& sys, double tau,
                         const std::vector<Complex>& z_samples,
                         const ModeBoundConstants& envelope);

struct ResonanceCheck {
    bool nonresonant = true;
    double worst_gap = 0.0; // smallest |tau (lambda_n - lambda_m) - 2 pi i l|
};

// Sampling-time resonance test over unstable pairs: tau (lambda_n - lambda_m)
// must avoid 2 pi i l for l != 0, |l| <= ceil(tau maxgap / 2 pi) + 1, within
// tolerance 1e-9 (1 + tau maxgap).  Vacuously true below two unstable modes.
ResonanceCheck check_nonresonance(const TruncatedSystem& sys, double tau);

struct FeedbackDesign {
    std::vector<std::size_t> indices;  // unstable mode indices, ascending
    std::vector<Complex> f_plus;       // feedback coefficients on those modes
    std::vector<Complex> achieved;     // eigenvalues of the placed block
    double condition = 0.0;            // condition number of the matching solve
    bool ill_conditioned = false;      // condition > 1e8
};

// Places the unstable block spectrum at the targets.  Preconditions: one
// target per unstable mode (SizeMismatch), strictly negative target real
// parts, targets closed under conjugation whenever the unstable eigenvalues
// are, nonzero b on every unstable mode (Uncontrollable).  The placed block
// is re-diagonalized to verify the targets; a non-Hurwitz result throws.
FeedbackDesign design_feedback(const TruncatedSystem& sys, const std::vector<Complex>& targets);

// Copy of sys with the designed coefficients written into the unstable slots.
TruncatedSystem with_designed_feedback(const TruncatedSystem& sys, const FeedbackDesign& design);

struct TauRow {
    double tau = 0.0;
    double eps_d = 0.0;
    bool nonresonant = true;
};

struct TauStarScan {
    std::vector<TauRow> rows;
    std::optional<double> tau_star; // largest grid prefix that certifies
    double floor_used = 0.0;
};

// Walks an ascending tau grid and reports the largest prefix along which the
// discrete margin stays >= eps_floor and sampling stays nonresonant.
TauStarScan estimate_tau_star(const TruncatedSystem& sys, const std::vector<double>& tau_grid,
                              double eps_floor);

} // namespace rieszlab
