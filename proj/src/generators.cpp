#include "rieszlab/generators.hpp"

#include <cmath>

namespace rieszlab {

namespace {

// Integral-test remainder: sum_{n>N} n^{-p} <= N^{1-p}/(p-1) for p > 1
// (the summand is decreasing, so the series is below the integral from N).
// Returns nothing when the series diverges.
std::optional<double> zeta_tail(std::size_t N, double p) {
    if (!(p > 1.0)) return std::nullopt;
    return std::pow(static_cast<double>(N), 1.0 - p) / (p - 1.0);
}

} // namespace

TruncatedSystem generate_synthetic(double alpha, double upsilon_scale, std::size_t N,
                                   PowerLaw b_law, PowerLaw f_law, double beta, double gamma,
                                   double omega) {
    if (N == 0) throw EmptySystem("generate_synthetic: N must be positive");
    if (!(alpha > 0.0) || !(upsilon_scale > 0.0))
        throw std::invalid_argument("generate_synthetic: alpha and upsilon_scale must be positive");

    // Declared classes must be summable for the infinite family, otherwise
    // the truncation would advertise a tail it does not have.
    if (b_law.scale != 0.0 && !(2.0 * b_law.exponent - 2.0 * beta > 1.0))
        throw DivergentCoupling("generate_synthetic: input class D^beta diverges for this law");
    if (f_law.scale != 0.0 && !(2.0 * f_law.exponent - 2.0 * gamma > 1.0))
        throw DivergentCoupling("generate_synthetic: feedback class D*^gamma diverges for this law");

    TruncatedSystem sys;
    sys.sector = SectorParams{alpha, upsilon_scale, omega};
    sys.beta = beta;
    sys.gamma = gamma;
    sys.modes.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double n = static_cast<double>(i + 1);
        sys.modes[i].lambda = Complex(-upsilon_scale / std::pow(n, alpha), n);
        sys.modes[i].b_coeff = b_law.scale * std::pow(n, -b_law.exponent);
        sys.modes[i].f_coeff = f_law.scale * std::pow(n, -f_law.exponent);
    }

    // Tail sums for n > N in closed form.  |lambda_n|^2 = n^2 + u^2 n^{-2a},
    // so |lambda_n|^{2w} <= n^{2w} (1 + u^2/N^{2+2a})^w for n > N, and the
    // remaining pure power series is bounded by its integral test.
    const double u2 = upsilon_scale * upsilon_scale;
    const double inflate = 1.0 + u2 / std::pow(static_cast<double>(N), 2.0 + 2.0 * alpha);
    auto weighted_tail = [&](const PowerLaw& law, double w) -> std::optional<double> {
        if (law.scale == 0.0) return 0.0;
        const auto base = zeta_tail(N, 2.0 * law.exponent - 2.0 * w);
        if (!base) return std::nullopt;
        return law.scale * law.scale * std::pow(inflate, w) * *base;
    };
    // |Re lambda_n| = u n^{-a}: the axis-gap weighted series trades the
    // graph-norm weight for n^{alpha}/u.
    auto axis_tail = [&](const PowerLaw& law) -> std::optional<double> {
        if (law.scale == 0.0) return 0.0;
        const auto base = zeta_tail(N, 2.0 * law.exponent - alpha);
        if (!base) return std::nullopt;
        return law.scale * law.scale / upsilon_scale * *base;
    };
    sys.tails.b_dnorm_sq = weighted_tail(b_law, beta);
    sys.tails.f_dnorm_sq = weighted_tail(f_law, gamma);
    sys.tails.b_l2_sq = weighted_tail(b_law, 0.0);
    sys.tails.f_l2_sq = weighted_tail(f_law, 0.0);
    sys.tails.b_over_axis_gap = axis_tail(b_law);
    sys.tails.f_over_axis_gap = axis_tail(f_law);

    sys.validate();
    return sys;
}

TruncatedSystem generate_wave(std::size_t N_pairs, double upsilon, double alpha,
                              const std::vector<double>& b0_coeffs, double beta, double gamma,
                              double omega) {
    if (N_pairs == 0) throw EmptySystem("generate_wave: N_pairs must be positive");
    if (!(upsilon > 0.0) || !(alpha > 0.0))
        throw std::invalid_argument("generate_wave: upsilon and alpha must be positive");
    if (b0_coeffs.size() > N_pairs)
        throw SizeMismatch("generate_wave: more forcing coefficients than mode pairs");

    TruncatedSystem sys;
    sys.sector = SectorParams{alpha, upsilon, omega};
    sys.beta = beta;
    sys.gamma = gamma;
    sys.modes.resize(2 * N_pairs);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t k = 0; k < N_pairs; ++k) {
        const double npi = static_cast<double>(k + 1) * M_PI;
        const double re = -upsilon / std::pow(npi, alpha);
        const double b0 = (k < b0_coeffs.size()) ? b0_coeffs[k] : 0.0;
        // Velocity-channel forcing in energy coordinates couples to the
        // +-i n pi pair as -+ i b0_n / sqrt(2) for unit-norm modes.
        sys.modes[2 * k].lambda = Complex(re, npi);
        sys.modes[2 * k].b_coeff = Complex(0.0, -inv_sqrt2 * b0);
        sys.modes[2 * k].f_coeff = 0.0;
        sys.modes[2 * k + 1].lambda = Complex(re, -npi);
        sys.modes[2 * k + 1].b_coeff = Complex(0.0, inv_sqrt2 * b0);
        sys.modes[2 * k + 1].f_coeff = 0.0;
    }
    // The forcing series is finite and feedback is finite by construction,
    // so every tail vanishes identically.
    sys.tails = TailSums::zero();

    sys.validate();
    return sys;
}

} // namespace rieszlab
