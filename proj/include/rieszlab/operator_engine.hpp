#pragma once

// Sampled-data operator algebra for diagonal-plus-rank-one systems.
//
// With zero-order hold of width tau, one sampling period maps a state x to
//
//   Delta(tau) x = D x + s (f . x),            (f . x) = sum_n f_n x_n,
//
// where D = diag(e^{tau lambda_n}) is the semigroup sample and
// s_n = b_n (e^{tau lambda_n} - 1) / lambda_n is the held-input map (the
// limit b_n tau at lambda_n = 0).  Everything downstream exploits this
// structure:
//
//   * applying Delta costs O(N);
//   * the resolvent of Delta follows from the diagonal resolvent by the
//     rank-one update formula
//       R(z, Delta) x = R_T x + R_T s * (f . R_T x) / (1 - H(z)),
//     with H(z) = f . R_T s = sum_n f_n s_n / (z - d_n), the discrete-time
//     transfer value;
//   * the continuous-time transfer value is G(lambda) =
//     sum_n b_n f_n / (lambda - lambda_n).
//
// Truncation tails of G and H are bounded by Cauchy-Schwarz against the tail
// sums carried by the system; the H bound additionally needs the per-mode
// envelope constants (upsilon1, upsilon2) produced by the stability module.

#include <cstddef>
#include <optional>
#include <vector>

#include "rieszlab/modal_core.hpp"

namespace rieszlab {

struct SampledOperator {
    double tau = 0.0;
    std::vector<Complex> diag;  // d_n = e^{tau lambda_n}
    std::vector<Complex> s_vec; // s_n = b_n (e^{tau lambda_n} - 1)/lambda_n
    std::vector<Complex> f_vec; // f_n
    std::vector<Complex> fs_vec; // cached f_n * s_n for transfer evaluations

    std::size_t size() const { return diag.size(); }
};

// (e^{tau lambda} - 1) / lambda with the removable singularity filled in and
// a series branch guarding the cancellation for small |tau lambda|.
Complex phi1(double tau, Complex lambda);

// Builds the one-period operator.  tau must be positive.
SampledOperator make_sampled(const TruncatedSystem& sys, double tau);

// Adjoint of Delta = D + s f^T: conj(D) + conj(f) conj(s)^T.  Returned in the
// same container so every Delta algorithm applies verbatim.
SampledOperator adjoint_of(const SampledOperator& op);

// y_n = e^{t lambda_n} x_n.  Throws NegativeTime for t < 0.
StateVec apply_semigroup(double t, const StateVec& x, const TruncatedSystem& sys);

// y_n = b_n (e^{tau lambda_n} - 1)/lambda_n * u, the hold map S(tau) u.
StateVec apply_input_map(double tau, Complex u, const TruncatedSystem& sys);

// f . x, summed in ascending mode order (no conjugation: the coefficients
// already absorb the pairing with the dual frame).
Complex apply_feedback(const StateVec& x, const TruncatedSystem& sys);
Complex apply_feedback(const StateVec& x, const SampledOperator& op);

// One sampling period, O(N).
StateVec apply_delta(const SampledOperator& op, const StateVec& x);

struct OrbitResult {
    std::vector<double> norms;          // ||x_k||, k = 0..K  (K+1 entries)
    std::vector<std::size_t> state_steps;
    std::vector<StateVec> states;       // snapshots at the recorded steps
};

// Iterates x_{k+1} = Delta x_k for K steps holding two state buffers only.
// state_stride > 0 records snapshots every state_stride steps (and step K).
OrbitResult delta_orbit(const SampledOperator& op, const StateVec& x0, std::size_t K,
                        std::size_t state_stride = 0);

struct TransferValue {
    Complex value;
    std::optional<double> tail_bound; // absent: tails unavailable, truncation-only
};

// G(lambda) = sum b_n f_n / (lambda - lambda_n).  Throws PoleHit when lambda
// is within 1e-14 (1 + |lambda_n|) of a pole.  The tail bound is valid for
// Re lambda >= 0 and uses |lambda - lambda_n| >= |Re lambda_n|:
//   |tail| <= sqrt(sum_{n>N} |b|^2/|Re lambda|) sqrt(sum_{n>N} |f|^2/|Re lambda|).
TransferValue transfer_G(Complex lambda, const TruncatedSystem& sys);

// H(z) = sum f_n s_n / (z - d_n).  Throws PoleHit near the d_n.
Complex transfer_H(const SampledOperator& op, Complex z);

// Per-mode envelope for the H tail: for a stable-tail mode,
//   |(1 - e^{tau lambda})/(z - e^{tau lambda})| / |lambda|
//     <= max(upsilon1, upsilon2 |lambda|^{alpha_tilde})   for |z| >= 1.
struct ModeBoundConstants {
    double upsilon1 = 0.0;
    double upsilon2 = 0.0;
    double alpha_tilde = 0.0; // must equal beta + gamma for the split below
};

// H value plus tail bound for |z| >= 1:
//   |tail| <= upsilon1 sqrt(Sb Sf) + upsilon2 sqrt(Sb_beta Sf_gamma)
// with Sb, Sf the plain l2 tail sums and Sb_beta, Sf_gamma the graph-norm
// tail sums.  The bound is absent when a needed sum is unavailable or when
// no envelope constants are supplied.
TransferValue transfer_H_bounded(const SampledOperator& op, Complex z,
                                 const TruncatedSystem& sys,
                                 const ModeBoundConstants* envelope);

// Diagonal resolvent y_n = x_n / (z - d_n).  Throws PoleHit near spectrum.
StateVec resolvent_T(const SampledOperator& op, Complex z, const StateVec& x);

// Rank-one-updated resolvent of Delta via the formula in the header comment.
// Throws SingularFeedbackDenominator when |1 - H(z)| <= 1e-12.
StateVec resolvent_delta(const SampledOperator& op, Complex z, const StateVec& x);

double state_norm(const StateVec& x);

} // namespace rieszlab
