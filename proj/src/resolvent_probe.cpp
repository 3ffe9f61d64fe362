#include "rieszlab/resolvent_probe.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace rieszlab {

ScalingFn ScalingFn::for_delta(double delta) {
    if (!(delta > 0.0) || delta > 0.5 + 1e-12)
        throw std::invalid_argument("ScalingFn: delta must lie in (0, 1/2]");
    if (std::abs(delta - 0.5) <= 1e-12) return {Kind::Log, 0.5};
    return {Kind::Power, delta};
}

double ScalingFn::operator()(double r) const {
    if (!(r > 1.0) || !(r < 2.0))
        throw std::invalid_argument("ScalingFn: r must lie in (1, 2)");
    switch (kind) {
        case Kind::Raw: return r - 1.0;
        case Kind::Power: return std::pow(r - 1.0, 1.0 - 2.0 * delta);
        case Kind::Log: return 1.0 / std::abs(std::log(r - 1.0));
    }
    return 0.0;
}

double circle_integral(const SampledOperator& op, double r, const StateVec& x,
                       std::size_t nodes, bool adjoint) {
    if (!(r > 1.0)) throw std::invalid_argument("circle_integral: r must exceed 1");
    if (nodes == 0) throw std::invalid_argument("circle_integral: nodes must be positive");
    if (x.size() != op.size())
        throw LengthMismatch("circle_integral: state length does not match operator size");
    const SampledOperator* use = &op;
    SampledOperator adj;
    if (adjoint) {
        adj = adjoint_of(op);
        use = &adj;
    }
    // Uniform trapezoid on a 2pi-periodic smooth integrand: plain node
    // average times the period, spectrally accurate.
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
        const double th = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(nodes);
        const StateVec y = resolvent_delta(*use, std::polar(r, th), x);
        double nrm = 0.0;
        for (const auto& v : y) nrm += std::norm(v);
        acc += nrm;
    }
    return acc * (2.0 * M_PI / static_cast<double>(nodes));
}

std::vector<double> default_radius_ladder() {
    std::vector<double> radii;
    for (int j = 1; j <= 18; ++j) radii.push_back(1.0 + std::ldexp(1.0, -j));
    return radii;
}

ScanTable scaled_scan(const SampledOperator& op, const StateVec& x, const ScalingFn& scaling,
                      const std::vector<double>& radii, std::size_t nodes, bool adjoint,
                      double tol) {
    if (radii.empty()) throw std::invalid_argument("scaled_scan: empty radius list");
    ScanTable table;
    table.tol = tol;
    for (double r : radii) {
        if (!(r >= 1.0 + 1e-6))
            throw std::invalid_argument("scaled_scan: radii must stay >= 1 + 1e-6");
        ScanRow row;
        row.r = r;
        row.nodes = nodes;
        row.adjoint = adjoint;
        row.raw_integral = circle_integral(op, r, x, nodes, adjoint);
        row.scaled_value = scaling(r) * row.raw_integral;
        table.rows.push_back(row);
    }
    // Least-squares slope of log(scaled) against log(r - 1); a positive slope
    // drives scaled -> 0 along r -> 1+.
    double su = 0.0, sy = 0.0, suu = 0.0, suy = 0.0;
    std::size_t cnt = 0;
    for (const auto& row : table.rows) {
        if (!(row.scaled_value > 0.0)) continue;
        const double u = std::log(row.r - 1.0);
        const double y = std::log(row.scaled_value);
        su += u;
        sy += y;
        suu += u * u;
        suy += u * y;
        ++cnt;
    }
    if (cnt >= 2) {
        const double denom = static_cast<double>(cnt) * suu - su * su;
        if (denom != 0.0) table.loglog_slope = (static_cast<double>(cnt) * suy - su * sy) / denom;
    }
    const double last = table.rows.back().scaled_value;
    table.limit_zero = (last < tol) && (table.loglog_slope > 0.0 || last == 0.0);
    return table;
}

double spectral_radius_estimate(const SampledOperator& op, std::size_t iters) {
    const std::size_t n = op.size();
    if (n == 0) throw EmptySystem("spectral_radius_estimate: empty operator");
    // Deterministic full-support start vector (splitmix64 stream).
    StateVec v(n);
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    auto next = [&state]() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    };
    for (auto& c : v) c = Complex(next() - 0.5, next() - 0.5);
    double nv = state_norm(v);
    if (nv == 0.0) return 0.0;
    for (auto& c : v) c /= nv;

    double rho = 0.0;
    for (std::size_t k = 0; k < iters; ++k) {
        StateVec w = apply_delta(op, v);
        const double nw = state_norm(w);
        if (nw == 0.0) return 0.0;
        rho = std::max(rho, nw);
        for (auto& c : w) c /= nw;
        v.swap(w);
    }
    return rho;
}

std::size_t parseval_kmax(const SampledOperator& op, double r, const StateVec& x) {
    if (!(r > 1.0)) throw std::invalid_argument("parseval_kmax: r must exceed 1");
    const double denom = r * r - 1.0;
    StateVec v = x;
    double runmax = 0.0;
    double rpow = 1.0; // r^{-2k}
    constexpr std::size_t kCap = 1000000;
    for (std::size_t k = 0; k <= kCap; ++k) {
        const double nsq = [&] {
            double acc = 0.0;
            for (const auto& c : v) acc += std::norm(c);
            return acc;
        }();
        runmax = std::max(runmax, nsq);
        if (nsq * rpow > 1e16 * (runmax + 1.0))
            throw SeriesDivergence("parseval_kmax: weighted orbit norms grow");
        if (runmax * rpow / denom < 1e-12) return k;
        v = apply_delta(op, v);
        rpow /= (r * r);
    }
    throw SeriesDivergence("parseval_kmax: geometric tail bound never satisfied");
}

ParsevalReport parseval_check(const SampledOperator& op, double r, const StateVec& x,
                              std::size_t nodes, std::size_t K_max) {
    const double rho = spectral_radius_estimate(op);
    if (!(r > rho + 0.01))
        throw std::invalid_argument("parseval_check: r must exceed the spectral radius estimate + 0.01");

    ParsevalReport rep;
    rep.lhs = circle_integral(op, r, x, nodes) / (2.0 * M_PI);

    StateVec v = x;
    double runmax = 0.0;
    double weight = 1.0 / (r * r); // r^{-2(k+1)}
    const double denom = r * r - 1.0;
    double acc = 0.0;
    std::size_t k = 0;
    for (; k <= K_max; ++k) {
        double nsq = 0.0;
        for (const auto& c : v) nsq += std::norm(c);
        runmax = std::max(runmax, nsq);
        const double term = nsq * weight;
        if (term > 1e16 * (runmax / (r * r) + 1.0))
            throw SeriesDivergence("parseval_check: weighted orbit series diverges");
        acc += term;
        if (runmax * weight * (r * r) / denom < 1e-12) break; // runmax r^{-2k}/(r^2-1)
        if (k == K_max) break;
        v = apply_delta(op, v);
        weight /= (r * r);
    }
    rep.rhs = acc;
    rep.k_used = std::min(k, K_max);
    rep.residual = std::abs(rep.lhs - rep.rhs);
    return rep;
}

} // namespace rieszlab
