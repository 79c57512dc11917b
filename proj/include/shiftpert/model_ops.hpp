#ifndef SHIFTPERT_MODEL_OPS_HPP
#define SHIFTPERT_MODEL_OPS_HPP

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shiftpert/analytic.hpp"
#include "shiftpert/measures.hpp"

namespace shiftpert {

// Taylor coefficients a_0..a_{count-1} of a function analytic and bounded on
// the closed unit disk, by discrete Fourier sampling on a circle of radius
// r < 1 with de-aliasing rescale r^{-m}.
std::vector<cplx> taylor_coefficients(const std::function<cplx(cplx)>& f, std::size_t count);

enum class OperatorKind { Shift, PerturbedShift, PhiShift, PhiPerturbedShift };

struct TruncatedOperator {
    int degree = 0;
    Eigen::MatrixXcd matrix;
    double tail_mass = 0.0;  // coefficient mass of the analytic factors beyond the section
};

struct DiffNorms {
    double op_norm = 0.0;
    double s1_norm = 0.0;
    int rank = 0;
    double bound_47 = 0.0;   // 2 sqrt(mu(T)), single block
    double bound_212 = 0.0;  // 2 sum_n sqrt(mu_n(T))
    std::vector<double> singular_values;
};

struct UnitaryBlockReport {
    double gram_max_dev = 0.0;
    double compression_max_dev = 0.0;
    std::vector<cplx> eigenvalues;
    std::vector<cplx> expected_atoms;
    double eigenvalue_max_dev = 0.0;
    bool ok = false;
    double tolerance = 0.0;
    int worst_row = -1, worst_col = -1;
};

// The perturbed shift S~ in its block form: each block contributes a Clark
// measure mu_n, the inner function theta_n, and the transplanted Clark basis
// theta_hat_n * b^{(n)}_k with theta_hat_n = prod_{m<n} theta_m.
class PerturbedShiftModel {
public:
    explicit PerturbedShiftModel(std::vector<CircleMeasure> blocks,
                                 std::size_t max_blocks = 32,
                                 std::size_t work_degree = 256);

    std::size_t block_count() const { return blocks_.size(); }
    std::size_t total_rank() const { return flat_.size(); }
    const InnerFunctionModel& block(std::size_t n) const { return blocks_[n]; }
    std::size_t work_degree() const { return work_degree_; }

    struct AtomRef {
        std::size_t block;
        std::size_t index;
        cplx xi;
        double weight;
    };
    const std::vector<AtomRef>& atoms() const { return flat_; }

    cplx theta_hat(std::size_t n, cplx z) const;  // prod_{m<n} theta_m(z)
    cplx theta_total(cplx z) const;               // prod over all blocks
    // Clark basis vector (flattened index): theta_hat_n sqrt(w) (1-theta_n)/(1-conj(xi) z)
    cplx basis(std::size_t i, cplx z) const;
    cplx perturbation_left(std::size_t n, cplx z) const;   // theta_hat_n (1 - theta_n)
    cplx perturbation_right(std::size_t n, cplx z) const;  // theta_hat_n g_n

    // S~ f = z f + sum_n <f, theta_hat_n g_n> theta_hat_n (1 - theta_n) in the
    // monomial basis; the appended analytic factors are expanded to the
    // working degree.
    std::vector<cplx> apply_stilde(std::span<const cplx> f) const;
    // coefficient mass of the analytic factors beyond degree M
    double truncation_tail(std::size_t M) const;

    DiffNorms stilde_minus_s_norms() const;
    UnitaryBlockReport unitary_block_check(double tol = 1e-8) const;

    std::vector<cplx> apply_phi_t_shift(double t, std::span<const cplx> f,
                                        std::size_t out_degree) const;
    std::vector<cplx> apply_phi_t_stilde(double t, std::span<const cplx> f,
                                         std::size_t out_degree) const;

    // max over atoms of |xi - (1 - 2 int_0^inf e^{-s} phi_s(xi) ds)|
    double cogenerator_identity_check() const;

    // coefficient columns of the Clark basis (length M)
    Eigen::MatrixXcd basis_coefficients(std::size_t M) const;

private:
    std::vector<InnerFunctionModel> blocks_;
    std::vector<AtomRef> flat_;
    std::size_t work_degree_;
    // cached coefficient expansions at the working degree
    std::vector<std::vector<cplx>> left_coeffs_;   // theta_hat_n (1 - theta_n)
    std::vector<std::vector<cplx>> right_coeffs_;  // theta_hat_n g_n
};

TruncatedOperator matrix_truncation(const PerturbedShiftModel& model, OperatorKind kind,
                                    double t, std::size_t M);

// CSV export of a truncated matrix: rows "row,col,re,im".
std::string truncated_matrix_csv(const TruncatedOperator& op);

}  // namespace shiftpert

#endif
