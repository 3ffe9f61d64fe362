#include "rieszlab/stability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace rieszlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sup over -1 <= Re mu <= 0, |Im mu| <= pi of |(1 - e^mu)/mu|.  The value is
// 1 (limit at mu = 0); the dense sample keeps the computation honest and a
// regression guard cheap, and the max with the limit value closes the grid's
// blind spot at the removable singularity.
double rectangle_envelope_sup() {
    static const double value = [] {
        constexpr int kSamples = 2001;
        double best = 0.0;
        for (int i = 0; i < kSamples; ++i) {
            const double re = -1.0 + static_cast<double>(i) / (kSamples - 1);
            for (int j = 0; j < kSamples; ++j) {
                const double im = -M_PI + 2.0 * M_PI * static_cast<double>(j) / (kSamples - 1);
                best = std::max(best, std::abs(phi1(1.0, Complex(re, im))));
            }
        }
        return std::max(best, 1.0);
    }();
    return value;
}

} // namespace

SpectrumSplit split_spectrum(const TruncatedSystem& sys) {
    SpectrumSplit split;
    for (std::size_t n = 0; n < sys.modes.size(); ++n) {
        const Complex l = sys.modes[n].lambda;
        if (l.real() > 0.0) split.unstable.push_back(n);
        if (classify_eigenvalue(l, sys.sector) != SectorClass::StableSector)
            split.bad_region.push_back(n);
        else
            split.stable.push_back(n);
    }
    return split;
}

double bad_region_circle_gap(const TruncatedSystem& sys, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("bad_region_circle_gap: tau must be positive");
    const SpectrumSplit split = split_spectrum(sys);
    double gap = kInf;
    for (std::size_t n : split.bad_region)
        gap = std::min(gap, std::abs(std::abs(std::exp(tau * sys.modes[n].lambda)) - 1.0));
    return gap;
}

BoundConstants gamma_constants(const TruncatedSystem& sys, double tau, double alpha_tilde,
                               double c1) {
    if (!(tau > 0.0)) throw std::invalid_argument("gamma_constants: tau must be positive");
    if (!(c1 > 0.0)) throw std::invalid_argument("gamma_constants: c1 must be positive");
    sys.sector.validate();
    if (alpha_tilde < sys.sector.alpha)
        throw std::invalid_argument("gamma_constants: alpha_tilde must be >= sector alpha");

    const SpectrumSplit split = split_spectrum(sys);
    if (split.stable.empty())
        throw EmptyStableTail("gamma_constants: no modes outside the bad region");

    BoundConstants c;
    c.alpha_tilde = alpha_tilde;
    c.m1 = rectangle_envelope_sup();
    c.kappa = kInf;
    for (std::size_t n : split.stable) c.kappa = std::min(c.kappa, std::abs(sys.modes[n].lambda));
    c.kappa_all = c.kappa;
    for (const auto& m : sys.modes) c.kappa_all = std::min(c.kappa_all, std::abs(m.lambda));
    if (!(c.kappa > 0.0))
        throw std::domain_error("gamma_constants: a stable mode sits at the origin");

    const double e = std::exp(1.0);
    const double one_minus = 1.0 - std::exp(-1.0);
    c.upsilon1 = std::max(2.0 / (one_minus * c.kappa), e * c.m1 / sys.sector.omega);
    c.upsilon2 = e * c.m1 / (sys.sector.upsilon * std::pow(c.kappa, alpha_tilde - sys.sector.alpha));

    // The companion constant covers every mode, so its powers use the global
    // minimum modulus; with an empty bad region c1 = +inf drops that branch.
    const double ka = std::pow(c.kappa_all, sys.sector.alpha);
    c.upsilon0 = std::max(std::max(1.0 / (c1 * ka), 1.0 / (one_minus * ka)),
                          std::max(e / (tau * sys.sector.omega * ka), e / (tau * sys.sector.upsilon)));
    return c;
}

ContinuousMargin continuous_margin(const TruncatedSystem& sys,
                                   const std::vector<double>& axis_grid,
                                   const std::vector<Complex>& probes) {
    if (sys.modes.empty()) throw EmptySystem("continuous_margin: no modes");
    ContinuousMargin out;

    double tail = 0.0;
    if (sys.tails.b_over_axis_gap && sys.tails.f_over_axis_gap) {
        out.tail_available = true;
        tail = std::sqrt(*sys.tails.b_over_axis_gap) * std::sqrt(*sys.tails.f_over_axis_gap);
        out.tail_bound = tail;
    }

    double best = kInf;
    Complex best_at;
    auto consider = [&](Complex lam, double value) {
        if (value < best) {
            best = value;
            best_at = lam;
        }
        ++out.grid_points;
    };

    auto eval_axis = [&](double w) {
        // A grid point that lands on a pole is nudged off it in steps of
        // 1e-9 (1 + |w|), alternating sides.
        const double step = 1e-9 * (1.0 + std::abs(w));
        for (int attempt = 0; attempt <= 64; ++attempt) {
            const double sign = (attempt % 2 == 0) ? 1.0 : -1.0;
            const double wa = w + sign * step * ((attempt + 1) / 2);
            try {
                const Complex lam(0.0, wa);
                consider(lam, std::abs(1.0 - transfer_G(lam, sys).value) - tail);
                return;
            } catch (const PoleHit&) {
            }
        }
        throw PoleHit("continuous_margin: could not nudge grid point off a pole");
    };

    for (double w : axis_grid) eval_axis(w);
    for (Complex p : probes) {
        if (p.real() < 0.0)
            throw std::invalid_argument("continuous_margin: probes must satisfy Re >= 0");
        consider(p, std::abs(1.0 - transfer_G(p, sys).value) - tail);
    }
    // Large |lambda| limit: the truncated sum vanishes, |1 - G| -> 1, and the
    // tail deduction still applies; recorded as a virtual point at infinity.
    consider(Complex(kInf, 0.0), 1.0 - tail);

    out.eps_c = best;
    out.argmin = best_at;
    return out;
}

namespace {

// Minimum of |1 - H| over the uniform circle grid restricted to odd node
// indices of the refined grid (the even ones replicate the parent grid).
void circle_min_update(const SampledOperator& op, std::size_t nodes, bool only_new,
                       double& min_value, double& argmin_theta) {
    const std::size_t start = only_new ? 1 : 0;
    const std::size_t stride = only_new ? 2 : 1;
    for (std::size_t j = start; j < nodes; j += stride) {
        const double th = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(nodes);
        const Complex z = std::polar(1.0, th);
        const double v = std::abs(1.0 - transfer_H(op, z));
        if (v < min_value) {
            min_value = v;
            argmin_theta = th;
        }
    }
}

} // namespace

DiscreteMargin discrete_margin(const SampledOperator& op, const TruncatedSystem& sys,
                               std::size_t min_nodes) {
    if (op.size() != sys.modes.size())
        throw SizeMismatch("discrete_margin: operator and system disagree");
    for (const auto& d : op.diag)
        if (std::abs(std::abs(d) - 1.0) < 1e-15)
            throw PoleOnCircle("discrete_margin: |e^{tau lambda}| = 1 for some mode");

    DiscreteMargin out;

    const auto& t = sys.tails;
    if (t.b_l2_sq && t.f_l2_sq && t.b_dnorm_sq && t.f_dnorm_sq &&
        sys.beta + sys.gamma >= sys.sector.alpha) {
        try {
            const BoundConstants c =
                gamma_constants(sys, op.tau, sys.beta + sys.gamma, bad_region_circle_gap(sys, op.tau));
            out.tail_bound = c.upsilon1 * std::sqrt(*t.b_l2_sq) * std::sqrt(*t.f_l2_sq) +
                             c.upsilon2 * std::sqrt(*t.b_dnorm_sq) * std::sqrt(*t.f_dnorm_sq);
            out.tail_available = true;
        } catch (const EmptyStableTail&) {
            // No stable modes to anchor the envelope: report truncation-only.
        }
    }

    std::size_t nodes = std::max<std::size_t>(min_nodes, 256);
    double min_value = kInf, argmin = 0.0;
    circle_min_update(op, nodes, false, min_value, argmin);
    double last_change = kInf;
    constexpr std::size_t kMaxNodes = std::size_t{1} << 20;
    while (nodes < kMaxNodes) {
        nodes *= 2;
        const double prev = min_value;
        circle_min_update(op, nodes, true, min_value, argmin);
        last_change = prev - min_value; // nested grids: never negative
        if (last_change < 1e-4) break;
    }

    out.eps_d = min_value - out.tail_bound;
    out.theta_argmin = argmin;
    out.nodes = nodes;
    out.last_change = last_change;
    return out;
}

double verify_mode_bound(const TruncatedSystem& sys, double tau,
                         const std::vector<Complex>& z_samples,
                         const ModeBoundConstants& envelope) {
    if (!(tau > 0.0)) throw std::invalid_argument("verify_mode_bound: tau must be positive");
    for (Complex z : z_samples)
        if (std::abs(z) < 1.0 - 1e-12)
            throw std::invalid_argument("verify_mode_bound: samples must satisfy |z| >= 1");
    const SpectrumSplit split = split_spectrum(sys);
    double worst = -kInf;
    for (std::size_t n : split.stable) {
        const Complex lambda = sys.modes[n].lambda;
        const Complex d = std::exp(tau * lambda);
        const double al = std::abs(lambda);
        const double rhs = std::max(envelope.upsilon1, envelope.upsilon2 * std::pow(al, envelope.alpha_tilde));
        for (Complex z : z_samples) {
            const double lhs = std::abs(1.0 - d) / (std::abs(z - d) * al);
            worst = std::max(worst, lhs - rhs);
        }
    }
    return worst;
}

ResonanceCheck check_nonresonance(const TruncatedSystem& sys, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("check_nonresonance: tau must be positive");
    const SpectrumSplit split = split_spectrum(sys);
    ResonanceCheck out;
    out.worst_gap = kInf;
    if (split.unstable.size() < 2) return out;

    double maxgap = 0.0;
    for (std::size_t a = 0; a < split.unstable.size(); ++a)
        for (std::size_t b = a + 1; b < split.unstable.size(); ++b)
            maxgap = std::max(maxgap, std::abs(sys.modes[split.unstable[a]].lambda -
                                               sys.modes[split.unstable[b]].lambda));
    const long lmax = static_cast<long>(std::ceil(tau * maxgap / (2.0 * M_PI))) + 1;
    const double tol = 1e-9 * (1.0 + tau * maxgap);

    for (std::size_t a = 0; a < split.unstable.size(); ++a) {
        for (std::size_t b = 0; b < split.unstable.size(); ++b) {
            if (a == b) continue;
            const Complex diff = tau * (sys.modes[split.unstable[a]].lambda -
                                        sys.modes[split.unstable[b]].lambda);
            for (long l = -lmax; l <= lmax; ++l) {
                if (l == 0) continue;
                const double gap = std::abs(diff - Complex(0.0, 2.0 * M_PI * static_cast<double>(l)));
                out.worst_gap = std::min(out.worst_gap, gap);
                if (gap <= tol) out.nonresonant = false;
            }
        }
    }
    return out;
}

namespace {

// Coefficients (ascending degree, leading 1) of prod (s - roots[i]).
std::vector<Complex> poly_from_roots(const std::vector<Complex>& roots) {
    std::vector<Complex> c{1.0};
    for (Complex r : roots) {
        std::vector<Complex> nc(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            nc[i] -= r * c[i];
            nc[i + 1] += c[i];
        }
        c = std::move(nc);
    }
    return c;
}

bool closed_under_conjugation(std::vector<Complex> v, double tol) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i].imag()) <= tol) continue;
        bool found = false;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (i == j) continue;
            if (std::abs(v[j] - std::conj(v[i])) <= tol) {
                std::swap(v[j], v.back());
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

} // namespace

FeedbackDesign design_feedback(const TruncatedSystem& sys, const std::vector<Complex>& targets) {
    const SpectrumSplit split = split_spectrum(sys);
    FeedbackDesign out;
    out.indices = split.unstable;
    const std::size_t m = out.indices.size();
    if (targets.size() != m)
        throw SizeMismatch("design_feedback: one target per unstable mode required");
    if (m == 0) return out;

    std::vector<Complex> lams(m), bs(m);
    for (std::size_t j = 0; j < m; ++j) {
        lams[j] = sys.modes[out.indices[j]].lambda;
        bs[j] = sys.modes[out.indices[j]].b_coeff;
        if (bs[j] == Complex(0.0, 0.0))
            throw Uncontrollable("design_feedback: unstable mode with zero input coupling");
    }
    for (Complex t : targets)
        if (!(t.real() < 0.0))
            throw std::invalid_argument("design_feedback: targets must have negative real part");
    if (closed_under_conjugation(lams, 1e-12) && !closed_under_conjugation(targets, 1e-12))
        throw std::invalid_argument("design_feedback: targets must be closed under conjugation");

    // det(sI - diag(lams) - b f^T) = p(s) - sum_j (b_j f_j) prod_{i!=j}(s - lams_i);
    // matching against q(s) = prod (s - targets) is linear in b_j f_j.
    const std::vector<Complex> p = poly_from_roots(lams);
    const std::vector<Complex> q = poly_from_roots(targets);

    Eigen::MatrixXcd W(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<Complex> others;
        others.reserve(m - 1);
        for (std::size_t i = 0; i < m; ++i)
            if (i != j) others.push_back(lams[i]);
        const std::vector<Complex> col = poly_from_roots(others); // degree m-1
        for (std::size_t k = 0; k < m; ++k) W(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = col[k];
    }
    Eigen::VectorXcd rhs(m);
    for (std::size_t k = 0; k < m; ++k) rhs(static_cast<Eigen::Index>(k)) = p[k] - q[k];

    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues()(static_cast<Eigen::Index>(m) - 1);
    out.condition = (smin > 0.0) ? svd.singularValues()(0) / smin : kInf;
    out.ill_conditioned = out.condition > 1e8;
    const Eigen::VectorXcd bf = svd.solve(rhs);

    out.f_plus.resize(m);
    for (std::size_t j = 0; j < m; ++j) out.f_plus[j] = bf(static_cast<Eigen::Index>(j)) / bs[j];

    // Re-diagonalize the placed block; targets must be met and Hurwitz.
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(m, m);
    for (std::size_t j = 0; j < m; ++j) A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = lams[j];
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c)
            A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) += bs[r] * out.f_plus[c];
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A);
    out.achieved.resize(m);
    for (std::size_t j = 0; j < m; ++j) out.achieved[j] = es.eigenvalues()(static_cast<Eigen::Index>(j));
    for (const Complex& a : out.achieved)
        if (!(a.real() < 0.0))
            throw NotHurwitz("design_feedback: placed block failed the Hurwitz check");
    return out;
}

TruncatedSystem with_designed_feedback(const TruncatedSystem& sys, const FeedbackDesign& design) {
    TruncatedSystem out = sys;
    for (std::size_t j = 0; j < design.indices.size(); ++j)
        out.modes[design.indices[j]].f_coeff = design.f_plus[j];
    return out;
}

TauStarScan estimate_tau_star(const TruncatedSystem& sys, const std::vector<double>& tau_grid,
                              double eps_floor) {
    if (tau_grid.empty()) throw std::invalid_argument("estimate_tau_star: empty tau grid");
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        if (!(tau_grid[i] > 0.0))
            throw std::invalid_argument("estimate_tau_star: tau grid must be positive");
        if (i > 0 && !(tau_grid[i] > tau_grid[i - 1]))
            throw std::invalid_argument("estimate_tau_star: tau grid must be ascending");
    }
    TauStarScan scan;
    scan.floor_used = eps_floor;
    bool prefix_ok = true;
    for (double tau : tau_grid) {
        const SampledOperator op = make_sampled(sys, tau);
        const DiscreteMargin dm = discrete_margin(op, sys);
        const ResonanceCheck rc = check_nonresonance(sys, tau);
        scan.rows.push_back({tau, dm.eps_d, rc.nonresonant});
        if (prefix_ok && dm.eps_d >= eps_floor && rc.nonresonant)
            scan.tau_star = tau;
        else
            prefix_ok = false;
    }
    return scan;
}

} // namespace rieszlab
