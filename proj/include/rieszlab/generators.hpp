#pragma once

// Built-in system families.
//
// synthetic_polynomial:  lambda_n = -upsilon_scale / n^alpha + i n with
//   power-law couplings b_n = b.scale n^{-b.exponent} (same for f).  Every
//   eigenvalue sits in the closed sector Omega_{alpha, upsilon_scale}, so the
//   default sector audit reports an empty bad region and the axis distance
//   upsilon_scale / N^alpha.  Tail sums for the infinite family are bounded
//   in closed form by integral-test remainders; a declared coefficient class
//   whose series diverges raises DivergentCoupling.
//
// wave_perturbed:  conjugate pairs lambda_{+-n} = -Upsilon/(n pi)^alpha
//   +- i n pi modeling a damped second-order string in energy coordinates;
//   the spectrum is a modeled stand-in, not an eigensolve.  Input coupling
//   comes from the sine-series coefficients of the forcing profile acting on
//   the velocity channel: with unit-norm modes, b_{+-n} = -+ i b0_n / sqrt2.
//   Feedback starts at zero; callers install a designed or configured f.
//   All tails vanish exactly because the supplied series is finite.

#include <cstddef>
#include <vector>

#include "rieszlab/modal_core.hpp"

namespace rieszlab {

struct PowerLaw {
    double scale = 0.0;
    double exponent = 0.0; // coeff_n = scale * n^{-exponent}
};

TruncatedSystem generate_synthetic(double alpha, double upsilon_scale, std::size_t N,
                                   PowerLaw b_law, PowerLaw f_law, double beta, double gamma,
                                   double omega = 1.0);

TruncatedSystem generate_wave(std::size_t N_pairs, double upsilon, double alpha,
                              const std::vector<double>& b0_coeffs, double beta, double gamma,
                              double omega = 1.0);

} // namespace rieszlab
