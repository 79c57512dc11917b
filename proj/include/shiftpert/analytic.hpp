#ifndef SHIFTPERT_ANALYTIC_HPP
#define SHIFTPERT_ANALYTIC_HPP

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shiftpert/measures.hpp"
#include "shiftpert/numerics.hpp"

namespace shiftpert {

/// Value of a boundary evaluation together with an at-atom flag: at Clark
/// atoms the rational formula degenerates and the known boundary limit is
/// substituted.
struct FlaggedValue {
    cplx value;
    bool at_atom = false;
};

// Pointwise evaluator for the inner function theta of an atomic Clark
// measure and the derived objects (Omega, g, reproducing kernel at 1).
// For n atoms theta is rational of degree n and every formula is exact;
// no Blaschke factorization is used anywhere.
class InnerFunctionModel {
public:
    explicit InnerFunctionModel(CircleMeasure mu);

    const CircleMeasure& measure() const { return mu_; }
    std::size_t degree() const { return mu_.size(); }

    // Herglotz transform R(z) = sum w_k (1 + conj(xi_k) z)/(1 - conj(xi_k) z).
    cplx herglotz(cplx z) const;
    cplx herglotz_prime(cplx z) const;

    FlaggedValue theta(cplx z) const;
    cplx theta_value(cplx z) const { return theta(z).value; }
    cplx theta_at_zero() const { return theta0_; }
    cplx theta_at_one() const { return theta1_; }
    cplx theta_prime(cplx z) const;

    // Theta(x) = theta((x-i)/(x+i)), Im x >= 0.
    cplx theta_halfplane(cplx x) const;

    // (Omega u)(z) = (1 - theta(z)) sum_k u_k w_k / (1 - conj(xi_k) z),
    // one coefficient per atom.
    FlaggedValue omega_apply(std::span<const cplx> u, cplx z) const;

    // g = Omega conj(xi); closed form (theta(z) - theta(0)) / (z (1 - theta(0))).
    cplx g(cplx z) const;

    // Reproducing kernel of K_theta at the point 1.
    cplx repkernel_one(cplx z) const;
    double repkernel_one_normsq_clark() const;       // via the Clark isometry
    double repkernel_one_normsq_quadrature() const;  // via H^2 boundary quadrature

private:
    CircleMeasure mu_;
    cplx theta0_;
    cplx theta1_;
};

// Semigroup symbols. phi_t(z) = exp(t (z+1)/(z-1)); psi_t(x) = e^{itx}.
cplx phi_t(double t, cplx z);
cplx psi_t(double t, cplx x);

// Theta evaluated straight from the line measure through the half-plane
// Herglotz formula; the independent route for the Cayley-coherence check.
cplx theta_halfplane_from_line(const LineMeasure& nu, cplx x);
cplx herglotz_halfplane_from_line(const LineMeasure& nu, cplx x);

struct CircleQuadratureOptions {
    std::size_t initial_grid = 256;
    std::size_t max_grid = (1u << 20);
    double tolerance = 1e-10;
};

// Trapezoid quadrature of f over the unit circle against normalized Lebesgue
// measure, on midpoint-offset grids doubled until two successive values agree.
// Spectrally accurate for integrands smooth on the circle.
cplx circle_mean(const std::function<cplx(cplx)>& f,
                 const CircleQuadratureOptions& opts = {});

// H^2 boundary inner product <f, g> = mean of f conj(g) over the circle.
cplx circle_inner(const std::function<cplx(cplx)>& f,
                  const std::function<cplx(cplx)>& g,
                  const CircleQuadratureOptions& opts = {});

double circle_normsq(const std::function<cplx(cplx)>& f,
                     const CircleQuadratureOptions& opts = {});

// Cross inner-product matrix G(p, q) = <f_p, f_q> of a whole family on one
// shared grid, doubled until every entry settles below the tolerance.
Eigen::MatrixXcd circle_gram(const std::vector<std::function<cplx(cplx)>>& fs,
                             const CircleQuadratureOptions& opts = {});

}  // namespace shiftpert

#endif
