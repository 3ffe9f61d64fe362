#include "rieszlab/operator_engine.hpp"

#include <cmath>

namespace rieszlab {

double state_norm(const StateVec& x) {
    double acc = 0.0;
    for (const auto& v : x) acc += std::norm(v);
    return std::sqrt(acc);
}

Complex phi1(double tau, Complex lambda) {
    const Complex w = tau * lambda;
    const double aw = std::abs(w);
    if (aw < 1e-4) {
        // (e^w - 1)/w = 1 + w/2 + w^2/6 + w^3/24, truncation below 1e-18 rel.
        return tau * (1.0 + w * (0.5 + w * (1.0 / 6.0 + w / 24.0)));
    }
    return (std::exp(w) - 1.0) / lambda;
}

SampledOperator make_sampled(const TruncatedSystem& sys, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("make_sampled: tau must be positive");
    SampledOperator op;
    op.tau = tau;
    const std::size_t n = sys.modes.size();
    op.diag.resize(n);
    op.s_vec.resize(n);
    op.f_vec.resize(n);
    op.fs_vec.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& m = sys.modes[i];
        op.diag[i] = std::exp(tau * m.lambda);
        op.s_vec[i] = m.b_coeff * phi1(tau, m.lambda);
        op.f_vec[i] = m.f_coeff;
        op.fs_vec[i] = op.f_vec[i] * op.s_vec[i];
    }
    return op;
}

SampledOperator adjoint_of(const SampledOperator& op) {
    SampledOperator adj;
    adj.tau = op.tau;
    const std::size_t n = op.size();
    adj.diag.resize(n);
    adj.s_vec.resize(n);
    adj.f_vec.resize(n);
    adj.fs_vec.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        adj.diag[i] = std::conj(op.diag[i]);
        adj.s_vec[i] = std::conj(op.f_vec[i]);
        adj.f_vec[i] = std::conj(op.s_vec[i]);
        adj.fs_vec[i] = adj.f_vec[i] * adj.s_vec[i];
    }
    return adj;
}

StateVec apply_semigroup(double t, const StateVec& x, const TruncatedSystem& sys) {
    if (t < 0.0) throw NegativeTime("apply_semigroup: t must be nonnegative");
    if (x.size() != sys.modes.size())
        throw LengthMismatch("apply_semigroup: state length does not match mode count");
    StateVec y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n)
        y[n] = std::exp(t * sys.modes[n].lambda) * x[n];
    return y;
}

StateVec apply_input_map(double tau, Complex u, const TruncatedSystem& sys) {
    if (tau < 0.0) throw NegativeTime("apply_input_map: tau must be nonnegative");
    StateVec y(sys.modes.size());
    for (std::size_t n = 0; n < y.size(); ++n)
        y[n] = sys.modes[n].b_coeff * phi1(tau, sys.modes[n].lambda) * u;
    return y;
}

Complex apply_feedback(const StateVec& x, const TruncatedSystem& sys) {
    if (x.size() != sys.modes.size())
        throw LengthMismatch("apply_feedback: state length does not match mode count");
    Complex acc = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) acc += sys.modes[n].f_coeff * x[n];
    return acc;
}

Complex apply_feedback(const StateVec& x, const SampledOperator& op) {
    if (x.size() != op.size())
        throw LengthMismatch("apply_feedback: state length does not match operator size");
    Complex acc = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) acc += op.f_vec[n] * x[n];
    return acc;
}

StateVec apply_delta(const SampledOperator& op, const StateVec& x) {
    const Complex u = apply_feedback(x, op);
    StateVec y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) y[n] = op.diag[n] * x[n] + op.s_vec[n] * u;
    return y;
}

OrbitResult delta_orbit(const SampledOperator& op, const StateVec& x0, std::size_t K,
                        std::size_t state_stride) {
    if (x0.size() != op.size())
        throw LengthMismatch("delta_orbit: state length does not match operator size");
    const std::size_t n = op.size();
    OrbitResult out;
    out.norms.reserve(K + 1);

    StateVec x = x0, y(n);
    auto record = [&](std::size_t k) {
        if (state_stride > 0 && (k % state_stride == 0 || k == K)) {
            out.state_steps.push_back(k);
            out.states.push_back(x);
        }
    };

    out.norms.push_back(state_norm(x));
    record(0);
    for (std::size_t k = 0; k < K; ++k) {
        Complex u = 0.0;
        for (std::size_t i = 0; i < n; ++i) u += op.f_vec[i] * x[i];
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = op.diag[i] * x[i] + op.s_vec[i] * u;
            acc += std::norm(y[i]);
        }
        x.swap(y);
        out.norms.push_back(std::sqrt(acc));
        record(k + 1);
    }
    return out;
}

TransferValue transfer_G(Complex lambda, const TruncatedSystem& sys) {
    TransferValue tv;
    Complex acc = 0.0;
    for (const auto& m : sys.modes) {
        const Complex d = lambda - m.lambda;
        if (std::abs(d) < 1e-14 * (1.0 + std::abs(m.lambda)))
            throw PoleHit("transfer_G: evaluation point on a pole");
        acc += m.b_coeff * m.f_coeff / d;
    }
    tv.value = acc;
    if (sys.tails.b_over_axis_gap && sys.tails.f_over_axis_gap)
        tv.tail_bound = std::sqrt(*sys.tails.b_over_axis_gap) * std::sqrt(*sys.tails.f_over_axis_gap);
    return tv;
}

Complex transfer_H(const SampledOperator& op, Complex z) {
    Complex acc = 0.0;
    for (std::size_t n = 0; n < op.size(); ++n) {
        const Complex d = z - op.diag[n];
        if (std::abs(d) < 1e-14 * (1.0 + std::abs(op.diag[n])))
            throw PoleHit("transfer_H: evaluation point on a pole");
        acc += op.fs_vec[n] / d;
    }
    return acc;
}

TransferValue transfer_H_bounded(const SampledOperator& op, Complex z,
                                 const TruncatedSystem& sys,
                                 const ModeBoundConstants* envelope) {
    TransferValue tv;
    tv.value = transfer_H(op, z);
    if (envelope == nullptr) return tv;
    const auto& t = sys.tails;
    if (t.b_l2_sq && t.f_l2_sq && t.b_dnorm_sq && t.f_dnorm_sq) {
        tv.tail_bound = envelope->upsilon1 * std::sqrt(*t.b_l2_sq) * std::sqrt(*t.f_l2_sq) +
                        envelope->upsilon2 * std::sqrt(*t.b_dnorm_sq) * std::sqrt(*t.f_dnorm_sq);
    }
    return tv;
}

StateVec resolvent_T(const SampledOperator& op, Complex z, const StateVec& x) {
    if (x.size() != op.size())
        throw LengthMismatch("resolvent_T: state length does not match operator size");
    StateVec y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        const Complex d = z - op.diag[n];
        if (std::abs(d) < 1e-14 * (1.0 + std::abs(op.diag[n])))
            throw PoleHit("resolvent_T: z on the diagonal spectrum");
        y[n] = x[n] / d;
    }
    return y;
}

StateVec resolvent_delta(const SampledOperator& op, Complex z, const StateVec& x) {
    // R(z, Delta) = R_T + R_T s (f . R_T ) / (1 - H(z)); one diagonal solve
    // for x, one for s, one scalar correction.
    StateVec rx = resolvent_T(op, z, x);
    const Complex h = transfer_H(op, z);
    const Complex denom = 1.0 - h;
    if (std::abs(denom) <= 1e-12)
        throw SingularFeedbackDenominator("resolvent_delta: 1 - H(z) below threshold");
    Complex frx = 0.0;
    for (std::size_t n = 0; n < rx.size(); ++n) frx += op.f_vec[n] * rx[n];
    const Complex scale = frx / denom;
    for (std::size_t n = 0; n < rx.size(); ++n) {
        const Complex rs = op.s_vec[n] / (z - op.diag[n]);
        rx[n] += rs * scale;
    }
    return rx;
}

} // namespace rieszlab
