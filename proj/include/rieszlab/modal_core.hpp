#pragma once

// Modal representation of a diagonalizable generator with scalar input and
// scalar feedback coupling.
//
// The state space is the sequence space of modal coefficients: a state x is
// identified with (x_n), its norm with the plain l2 norm, and the generator
// acts diagonally, (Ax)_n = lambda_n x_n.  The frame constants of the mode
// basis are normalized to 1, so no Riesz-basis distortion factors appear in
// any estimate.  A truncation keeps N modes and optionally carries closed-form
// bounds for the discarded tail.
//
// The sector parameters (alpha, Upsilon, omega) describe where eigenvalues
// are allowed to accumulate:
//
//   Omega = { lambda not real : Re lambda <= -Upsilon / |Im lambda|^alpha },
//
// and the "bad region" is { Re lambda > -omega } minus Omega.  Structural
// health of a truncation is summarized by four audits:
//
//   A1: how many modes sit in the bad region (finitely many required);
//   A2: no mode on the imaginary axis (min |Re lambda_n| > 0);
//   A3: closed-loop decay itself; not decidable from mode data, reported
//       unknown and certified empirically elsewhere;
//   A4: the coupling coefficients lie in the graph-norm classes D^beta
//       (input) and D*^gamma (feedback) with beta + gamma large enough:
//       either beta, gamma integers with beta + gamma >= alpha, or
//       beta + gamma > alpha.

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "rieszlab/errors.hpp"

namespace rieszlab {

using Complex = std::complex<double>;
using StateVec = std::vector<Complex>;

struct ModeTriple {
    Complex lambda; // eigenvalue
    Complex b_coeff; // input coupling  <b, psi_n>
    Complex f_coeff; // feedback coupling <phi_n, f>
};

struct SectorParams {
    double alpha = 1.0;
    double upsilon = 1.0;
    double omega = 1.0;

    void validate() const {
        if (!(alpha > 0.0) || !(upsilon > 0.0) || !(omega > 0.0))
            throw std::invalid_argument("SectorParams: alpha, upsilon, omega must be positive");
    }
};

enum class SectorClass { BadRegion, StableSector, OnAxis };

// Tail sums for the modes discarded by the truncation.  Each entry is the
// exact value (or a rigorous upper bound) of the indicated series over
// n > N; an empty optional means the generator could not supply it.
struct TailSums {
    std::optional<double> b_dnorm_sq;     // sum |lambda_n|^{2 beta} |b_n|^2
    std::optional<double> f_dnorm_sq;     // sum |lambda_n|^{2 gamma} |f_n|^2
    std::optional<double> b_l2_sq;        // sum |b_n|^2
    std::optional<double> f_l2_sq;        // sum |f_n|^2
    std::optional<double> b_over_axis_gap; // sum |b_n|^2 / |Re lambda_n|
    std::optional<double> f_over_axis_gap; // sum |f_n|^2 / |Re lambda_n|

    static TailSums zero() {
        TailSums t;
        t.b_dnorm_sq = t.f_dnorm_sq = t.b_l2_sq = t.f_l2_sq = 0.0;
        t.b_over_axis_gap = t.f_over_axis_gap = 0.0;
        return t;
    }
    bool any() const {
        return b_dnorm_sq || f_dnorm_sq || b_l2_sq || f_l2_sq || b_over_axis_gap ||
               f_over_axis_gap;
    }
};

struct TruncatedSystem {
    std::vector<ModeTriple> modes;
    SectorParams sector;
    double beta = 0.0;  // declared input class D^beta
    double gamma = 0.0; // declared feedback class D*^gamma
    TailSums tails;     // all-absent tails mean "truncation-only" results

    std::size_t size() const { return modes.size(); }

    // Eigenvalues must be simple; duplicates break both the diagonal
    // resolvent and the rank-one pole-placement formulas.
    void validate() const;
};

enum class Verdict { Pass, Fail, Unknown };

struct AssumptionReport {
    std::size_t a1_count_in_bad_region = 0;
    std::vector<std::size_t> a1_indices;
    double a2_min_axis_distance = 0.0;
    double a4_beta_norm = 0.0;  // sqrt(sum |lambda|^{2 beta} |b|^2 + tail)
    double a4_gamma_norm = 0.0; // sqrt(sum |lambda|^{2 gamma} |f|^2 + tail)
    int a4_branch = 0;          // 1 = integer exponents, 2 = strict sum, 0 = neither
    Verdict a1 = Verdict::Unknown;
    Verdict a2 = Verdict::Unknown;
    Verdict a3 = Verdict::Unknown; // always Unknown: not decidable from mode data
    Verdict a4 = Verdict::Unknown;

    bool structural_pass() const {
        return a1 == Verdict::Pass && a2 == Verdict::Pass && a4 == Verdict::Pass;
    }
};

// Exactly one class per eigenvalue.  The axis takes precedence: points with
// Re lambda = 0 always report OnAxis even though they also violate the
// bad-region bound.  The sector boundary Re lambda = -Upsilon/|Im lambda|^alpha
// belongs to the sector, and real eigenvalues are never in the sector, so a
// real lambda with -omega < Re lambda < 0 lands in BadRegion.
SectorClass classify_eigenvalue(Complex lambda, const SectorParams& sector);

// Structural audit of a truncation.  Throws EmptySystem when there are no
// modes.  A1 counts bad-region modes (axis modes included; the count is
// always finite here, so the verdict is Pass and the count is the payload).
// A2 passes iff min |Re lambda_n| > 0.  A4 checks the declared (beta, gamma)
// pair and reports which branch of the class condition holds.
AssumptionReport audit_assumptions(const TruncatedSystem& sys);

// Graph norm sqrt(sum |lambda_n|^{2 delta} |x_n|^2).  delta = 0 recovers the
// plain norm.  Throws LengthMismatch when x and the mode list disagree.
double dnorm(const StateVec& x, double delta, const TruncatedSystem& sys);

// y_n = (-lambda_n)^{-delta} x_n using the principal branch of the power.
// Demands Re lambda_n < 0 for every mode (throws UnstableMode otherwise);
// the principal branch is then evaluated away from the cut.
StateVec fractional_apply(const StateVec& x, double delta, const TruncatedSystem& sys);

} // namespace rieszlab
