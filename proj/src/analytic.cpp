#include "shiftpert/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace shiftpert {

namespace {
constexpr double kAtomGuard = 1e-13;
}

InnerFunctionModel::InnerFunctionModel(CircleMeasure mu) : mu_(std::move(mu)) {
    double mass = mu_.total_mass();
    theta0_ = cplx(mass - 1.0, 0.0) / cplx(mass + 1.0, 0.0);
    // No atom sits at 1, so R(1) is finite and theta extends continuously.
    theta1_ = theta(cplx(1.0, 0.0)).value;
}

cplx InnerFunctionModel::herglotz(cplx z) const {
    CompensatedComplexSum s;
    for (const auto& a : mu_.atoms()) {
        cplx xz = std::conj(a.point) * z;
        s.add(a.weight * (cplx(1.0, 0.0) + xz) / (cplx(1.0, 0.0) - xz));
    }
    return s.value();
}

cplx InnerFunctionModel::herglotz_prime(cplx z) const {
    CompensatedComplexSum s;
    for (const auto& a : mu_.atoms()) {
        cplx xb = std::conj(a.point);
        cplx d = cplx(1.0, 0.0) - xb * z;
        s.add(a.weight * 2.0 * xb / (d * d));
    }
    return s.value();
}

FlaggedValue InnerFunctionModel::theta(cplx z) const {
    for (const auto& a : mu_.atoms())
        if (std::abs(cplx(1.0, 0.0) - std::conj(a.point) * z) < kAtomGuard)
            return {cplx(1.0, 0.0), true};
    cplx r = herglotz(z);
    return {(r - 1.0) / (r + 1.0), false};
}

cplx InnerFunctionModel::theta_prime(cplx z) const {
    cplx r = herglotz(z);
    cplx rp = herglotz_prime(z);
    cplx d = r + 1.0;
    return 2.0 * rp / (d * d);
}

cplx InnerFunctionModel::theta_halfplane(cplx x) const {
    cplx denom = x + cplx(0.0, 1.0);
    if (std::abs(denom) < kAtomGuard)
        throw std::domain_error("theta_halfplane: x = -i is outside the closed upper half-plane");
    return theta((x - cplx(0.0, 1.0)) / denom).value;
}

FlaggedValue InnerFunctionModel::omega_apply(std::span<const cplx> u, cplx z) const {
    if (u.size() != mu_.size())
        throw std::invalid_argument("omega_apply: one coefficient per atom required");
    const auto& atoms = mu_.atoms();
    for (std::size_t k = 0; k < atoms.size(); ++k)
        if (std::abs(cplx(1.0, 0.0) - std::conj(atoms[k].point) * z) < kAtomGuard)
            return {u[k], true};  // nontangential limit of Omega u at the atom
    CompensatedComplexSum s;
    for (std::size_t k = 0; k < atoms.size(); ++k)
        s.add(u[k] * atoms[k].weight / (cplx(1.0, 0.0) - std::conj(atoms[k].point) * z));
    return {(cplx(1.0, 0.0) - theta(z).value) * s.value(), false};
}

cplx InnerFunctionModel::g(cplx z) const {
    cplx one_minus_t0 = cplx(1.0, 0.0) - theta0_;
    if (std::abs(z) < 1e-6) {
        // Removable singularity at 0: two-term Taylor expansion of theta.
        double mass = mu_.total_mass();
        cplx r0(mass, 0.0);
        CompensatedComplexSum s1, s2;
        for (const auto& a : mu_.atoms()) {
            cplx xb = std::conj(a.point);
            s1.add(2.0 * a.weight * xb);
            s2.add(4.0 * a.weight * xb * xb);
        }
        cplx rp = s1.value(), rpp = s2.value();
        cplx d = r0 + 1.0;
        cplx tp = 2.0 * rp / (d * d);
        cplx tpp = 2.0 * rpp / (d * d) - 4.0 * rp * rp / (d * d * d);
        return (tp + 0.5 * tpp * z) / one_minus_t0;
    }
    return (theta(z).value - theta0_) / (z * one_minus_t0);
}

cplx InnerFunctionModel::repkernel_one(cplx z) const {
    if (std::abs(cplx(1.0, 0.0) - z) < 1e-8)
        return std::conj(theta1_) * theta_prime(cplx(1.0, 0.0));
    return (cplx(1.0, 0.0) - std::conj(theta1_) * theta(z).value) / (cplx(1.0, 0.0) - z);
}

double InnerFunctionModel::repkernel_one_normsq_clark() const {
    return std::norm(cplx(1.0, 0.0) - theta1_) * moment_integral(mu_, 2.0);
}

double InnerFunctionModel::repkernel_one_normsq_quadrature() const {
    CircleQuadratureOptions opts;
    opts.tolerance = 1e-11;
    return circle_normsq([this](cplx z) { return repkernel_one(z); }, opts);
}

cplx phi_t(double t, cplx z) {
    if (t < 0.0) throw std::invalid_argument("phi_t: t must be >= 0");
    if (std::abs(z - cplx(1.0, 0.0)) < 1e-15)
        throw std::domain_error("phi_t: essential singularity at z = 1");
    return std::exp(t * (z + 1.0) / (z - 1.0));
}

cplx psi_t(double t, cplx x) {
    if (t < 0.0) throw std::invalid_argument("psi_t: t must be >= 0");
    return std::exp(cplx(0.0, t) * x);
}

cplx herglotz_halfplane_from_line(const LineMeasure& nu, cplx x) {
    CompensatedComplexSum s;
    for (const auto& a : nu.atoms()) {
        cplx term = cplx(1.0, 0.0) / (cplx(a.point, 0.0) - x) -
                    cplx(a.point / (1.0 + a.point * a.point), 0.0);
        s.add(a.mass * term);
    }
    return s.value() / cplx(0.0, kPi);
}

cplx theta_halfplane_from_line(const LineMeasure& nu, cplx x) {
    for (const auto& a : nu.atoms())
        if (std::abs(cplx(a.point, 0.0) - x) < kAtomGuard)
            return cplx(1.0, 0.0);  // Clark boundary value transplanted
    cplx h = herglotz_halfplane_from_line(nu, x);
    return (h - 1.0) / (h + 1.0);
}

namespace {

cplx circle_mean_on_grid(const std::function<cplx(cplx)>& f, std::size_t m) {
    CompensatedComplexSum s;
    for (std::size_t j = 0; j < m; ++j) {
        double phi = 2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(m);
        s.add(f(cplx(std::cos(phi), std::sin(phi))));
    }
    return s.value() / static_cast<double>(m);
}

}  // namespace

cplx circle_mean(const std::function<cplx(cplx)>& f, const CircleQuadratureOptions& opts) {
    std::size_t m = opts.initial_grid;
    cplx prev = circle_mean_on_grid(f, m);
    while (m < opts.max_grid) {
        m *= 2;
        cplx cur = circle_mean_on_grid(f, m);
        if (std::abs(cur - prev) < opts.tolerance * std::max(1.0, std::abs(cur)))
            return cur;
        prev = cur;
    }
    return prev;
}

cplx circle_inner(const std::function<cplx(cplx)>& f,
                  const std::function<cplx(cplx)>& g,
                  const CircleQuadratureOptions& opts) {
    return circle_mean([&](cplx z) { return f(z) * std::conj(g(z)); }, opts);
}

double circle_normsq(const std::function<cplx(cplx)>& f, const CircleQuadratureOptions& opts) {
    return circle_mean([&](cplx z) { return cplx(std::norm(f(z)), 0.0); }, opts).real();
}

namespace {

Eigen::MatrixXcd circle_gram_on_grid(const std::vector<std::function<cplx(cplx)>>& fs,
                                     std::size_t m) {
    const auto n = static_cast<Eigen::Index>(fs.size());
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    std::vector<cplx> vals(fs.size());
    for (std::size_t j = 0; j < m; ++j) {
        double phi = 2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(m);
        cplx z(std::cos(phi), std::sin(phi));
        for (std::size_t k = 0; k < fs.size(); ++k) vals[k] = fs[k](z);
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = 0; q < n; ++q)
                acc(p, q) += vals[static_cast<std::size_t>(p)] *
                             std::conj(vals[static_cast<std::size_t>(q)]);
    }
    return acc / static_cast<double>(m);
}

}  // namespace

Eigen::MatrixXcd circle_gram(const std::vector<std::function<cplx(cplx)>>& fs,
                             const CircleQuadratureOptions& opts) {
    if (fs.empty()) return {};
    std::size_t m = opts.initial_grid;
    Eigen::MatrixXcd prev = circle_gram_on_grid(fs, m);
    while (m < opts.max_grid) {
        m *= 2;
        Eigen::MatrixXcd cur = circle_gram_on_grid(fs, m);
        if ((cur - prev).cwiseAbs().maxCoeff() < opts.tolerance) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace shiftpert
