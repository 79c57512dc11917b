#ifndef SHIFTPERT_LINE_QUADRATURE_HPP
#define SHIFTPERT_LINE_QUADRATURE_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "shiftpert/numerics.hpp"

namespace shiftpert::detail {

// Column of a finite-rank integral operator evaluated on the real line.
// The full value is v(x) = amp_dc(x) + amp_osc(x) e^{i freq x}; `value`
// must be a numerically stable evaluation of that sum (the split parts may
// have removable real poles that cancel in the sum), while the split parts
// are only consulted in the far tails |x| > cutoff where they are smooth.
struct OscColumn {
    double freq = 0.0;
    std::function<cplx(double)> value;
    std::function<cplx(double)> amp_dc;
    std::function<cplx(double)> amp_osc;
};

// Mesh description: uniform oscillation-resolving panels on [-X, X] with
// dyadic grading around each feature (position, smallest length scale).
struct LineMesh {
    double half_width = 2000.0;
    double max_freq = 1.0;
    std::vector<std::pair<double, double>> features;

    std::vector<double> build_edges() const;
    double effective_half_width() const;
};

// Gram matrix G(j,k) = int v_k(x) conj(v_j(x)) dx over the whole line:
// panel-wise Gauss-Legendre on the mesh plus analytic oscillatory-tail
// integration (integration by parts in the oscillation, 1/x substitution
// for the zero-frequency part).
struct LineGramResult {
    Eigen::MatrixXcd gram;
    double est_error = 0.0;
};

LineGramResult line_gram(const std::vector<OscColumn>& cols, const LineMesh& mesh);

// Trace-only evaluation (sum of diagonal entries) with a single streaming
// pass over the mesh; used where only the Hilbert-Schmidt norm is needed.
double line_gram_trace(const std::vector<OscColumn>& cols, const LineMesh& mesh);

// Tail integral of a single smooth complex amplitude g against e^{i omega x}
// over [cutoff, +inf) (ray = +1) or (-inf, -cutoff] (ray = -1).
cplx oscillatory_tail(const std::function<cplx(double)>& g, double omega,
                      double cutoff, int ray);

// Tail integral of a smooth amplitude decaying like 1/x^2, same rays.
cplx algebraic_tail(const std::function<cplx(double)>& g, double cutoff, int ray);

}  // namespace shiftpert::detail

#endif
