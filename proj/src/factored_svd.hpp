#ifndef SHIFTPERT_FACTORED_SVD_HPP
#define SHIFTPERT_FACTORED_SVD_HPP

#include <vector>

#include <Eigen/Dense>

namespace shiftpert::detail {

// Singular values of the finite-rank operator T = sum_n <., u_n> w_n from
// the two column-family Grams: with W = Q_w S_w, U = Q_u S_u (Q isometric),
// T = W U^H has the singular values of the small core S_w S_u^H.
inline std::vector<double> factored_singular_values(const Eigen::MatrixXcd& gram_w,
                                                    const Eigen::MatrixXcd& gram_u) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ew(gram_w), eu(gram_u);
    auto sqrt_factor = [](const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>& es) {
        Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return Eigen::MatrixXcd(d.asDiagonal() * es.eigenvectors().adjoint());
    };
    Eigen::MatrixXcd core = sqrt_factor(ew) * sqrt_factor(eu).adjoint();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(core);
    return {svd.singularValues().data(),
            svd.singularValues().data() + svd.singularValues().size()};
}

}  // namespace shiftpert::detail

#endif
