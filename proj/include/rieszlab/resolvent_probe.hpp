#pragma once

// Resolvent circle integrals as decay certificates.
//
// For a power-bounded Delta, Parseval's identity on the Neumann series of
// R(z, Delta) gives, for r > spectral radius,
//
//   (1/2pi) Int_0^{2pi} ||R(r e^{i th}, Delta) x||^2 dth
//       = sum_{k >= 0} ||Delta^k x||^2 / r^{2(k+1)},
//
// which both validates the quadrature and links circle integrals to orbit
// decay.  Strong stability corresponds to
//
//   (r - 1) Int_0^{2pi} ||R(r e^{i th}, Delta) x||^2 dth -> 0  as r -> 1+,
//
// together with the same limit for the adjoint, and the polynomial rate
// x_k = o(k^{-delta}) (0 < delta <= 1/2) corresponds to the scaled limit
// with weight
//
//   Lambda_delta(r) = (r - 1)^{1 - 2 delta}   for 0 < delta < 1/2,
//   Lambda_1/2(r)   = 1 / |log(r - 1)|        for delta = 1/2.
//
// The integrand is smooth and 2pi-periodic, so the uniform trapezoid rule
// converges spectrally fast in the node count.

#include <cstddef>
#include <vector>

#include "rieszlab/operator_engine.hpp"

namespace rieszlab {

struct ScalingFn {
    enum class Kind { Raw, Power, Log };
    Kind kind = Kind::Raw;
    double delta = 0.0;

    static ScalingFn raw() { return {Kind::Raw, 0.0}; }

    // Picks Lambda_delta for delta in (0, 1/2]; the log form iff delta = 1/2
    // (within 1e-12).
    static ScalingFn for_delta(double delta);

    // Evaluated for 1 < r < 2 (so that log(r-1) != 0 is guaranteed).
    double operator()(double r) const;
};

// Trapezoid value of Int_0^{2pi} ||R(r e^{i th}, Delta) x||^2 dth on the
// uniform grid th_j = 2 pi j / nodes.  adjoint = true integrates the adjoint
// operator instead.  Requires r > 1 and nodes >= 1.
double circle_integral(const SampledOperator& op, double r, const StateVec& x,
                       std::size_t nodes, bool adjoint = false);

struct ScanRow {
    double r = 0.0;
    double raw_integral = 0.0;
    double scaled_value = 0.0; // scaling(r) * raw_integral
    std::size_t nodes = 0;
    bool adjoint = false;
};

struct ScanTable {
    std::vector<ScanRow> rows;      // r descending toward 1
    double loglog_slope = 0.0;      // slope of log(scaled) vs log(r - 1)
    bool limit_zero = false;        // last scaled < tol and slope positive
    double tol = 1e-3;
};

// Default radius ladder r_j = 1 + 2^{-j}, j = 1..18.
std::vector<double> default_radius_ladder();

ScanTable scaled_scan(const SampledOperator& op, const StateVec& x, const ScalingFn& scaling,
                      const std::vector<double>& radii, std::size_t nodes,
                      bool adjoint = false, double tol = 1e-3);

// Power-iteration estimate of the spectral radius of Delta (deterministic
// start vector).
double spectral_radius_estimate(const SampledOperator& op, std::size_t iters = 256);

// Smallest K with runmax_k ||Delta^k x||^2 * r^{-2K} / (r^2 - 1) < 1e-12,
// capped at 1e6.  Throws SeriesDivergence when the weighted terms grow.
std::size_t parseval_kmax(const SampledOperator& op, double r, const StateVec& x);

struct ParsevalReport {
    double lhs = 0.0;       // quadrature / 2 pi
    double rhs = 0.0;       // truncated orbit series
    double residual = 0.0;  // |lhs - rhs|
    std::size_t k_used = 0;
};

// Checks the Parseval identity above.  Requires r exceeding the spectral
// radius estimate by 0.01; the series is summed to K_max or until the
// geometric tail bound drops below 1e-12.
ParsevalReport parseval_check(const SampledOperator& op, double r, const StateVec& x,
                              std::size_t nodes, std::size_t K_max);

} // namespace rieszlab
