#include "shiftpert/model_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "factored_svd.hpp"

namespace shiftpert {

namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

Eigen::MatrixXcd circle_cross_matrix(const std::vector<std::function<cplx(cplx)>>& fs) {
    CircleQuadratureOptions opts;
    opts.initial_grid = 512;
    opts.max_grid = (1u << 21);
    opts.tolerance = 1e-11;
    return circle_gram(fs, opts);
}

}  // namespace

std::vector<cplx> taylor_coefficients(const std::function<cplx(cplx)>& f, std::size_t count) {
    if (count == 0) return {};
    const std::size_t grid = next_pow2(std::max<std::size_t>(4 * count, 256));
    // radius chosen so the de-aliasing rescale amplifies roundoff by at most
    // ~1e4 at the last kept coefficient while aliasing stays below 1e-16
    const double r = std::exp(-9.21 / static_cast<double>(count));
    std::vector<cplx> samples(grid);
    for (std::size_t j = 0; j < grid; ++j) {
        double phi = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(grid);
        samples[j] = f(r * cplx(std::cos(phi), std::sin(phi)));
    }
    fft_radix2(samples, false);
    std::vector<cplx> coeffs(count);
    double rm = 1.0;
    for (std::size_t m = 0; m < count; ++m) {
        coeffs[m] = samples[m] / (static_cast<double>(grid) * rm);
        rm *= r;
    }
    return coeffs;
}

PerturbedShiftModel::PerturbedShiftModel(std::vector<CircleMeasure> blocks,
                                         std::size_t max_blocks,
                                         std::size_t work_degree)
    : work_degree_(work_degree) {
    if (blocks.size() > max_blocks)
        throw std::invalid_argument("PerturbedShiftModel: block count exceeds the configured maximum");
    blocks_.reserve(blocks.size());
    for (auto& b : blocks) blocks_.emplace_back(std::move(b));
    for (std::size_t n = 0; n < blocks_.size(); ++n) {
        const auto& atoms = blocks_[n].measure().atoms();
        for (std::size_t k = 0; k < atoms.size(); ++k)
            flat_.push_back({n, k, atoms[k].point, atoms[k].weight});
    }
    left_coeffs_.resize(blocks_.size());
    right_coeffs_.resize(blocks_.size());
    for (std::size_t n = 0; n < blocks_.size(); ++n) {
        left_coeffs_[n] = taylor_coefficients(
            [this, n](cplx z) { return perturbation_left(n, z); }, work_degree_);
        right_coeffs_[n] = taylor_coefficients(
            [this, n](cplx z) { return perturbation_right(n, z); }, work_degree_);
    }
}

cplx PerturbedShiftModel::theta_hat(std::size_t n, cplx z) const {
    cplx p(1.0, 0.0);
    for (std::size_t m = 0; m < n; ++m) p *= blocks_[m].theta(z).value;
    return p;
}

cplx PerturbedShiftModel::theta_total(cplx z) const { return theta_hat(blocks_.size(), z); }

cplx PerturbedShiftModel::basis(std::size_t i, cplx z) const {
    const AtomRef& a = flat_[i];
    const auto& blk = blocks_[a.block];
    cplx denom = cplx(1.0, 0.0) - std::conj(a.xi) * z;
    if (std::abs(denom) < 1e-13) {
        // removable on the boundary: (1 - theta)/(1 - conj(xi) z) has the
        // finite limit theta'(xi) xi at the atom
        return theta_hat(a.block, z) * std::sqrt(a.weight) * blk.theta_prime(z) * a.xi;
    }
    return theta_hat(a.block, z) * std::sqrt(a.weight) *
           (cplx(1.0, 0.0) - blk.theta(z).value) / denom;
}

cplx PerturbedShiftModel::perturbation_left(std::size_t n, cplx z) const {
    return theta_hat(n, z) * (cplx(1.0, 0.0) - blocks_[n].theta(z).value);
}

cplx PerturbedShiftModel::perturbation_right(std::size_t n, cplx z) const {
    return theta_hat(n, z) * blocks_[n].g(z);
}

std::vector<cplx> PerturbedShiftModel::apply_stilde(std::span<const cplx> f) const {
    const std::size_t out_len = std::max(f.size() + 1, work_degree_);
    std::vector<cplx> out(out_len, cplx(0.0, 0.0));
    for (std::size_t m = 0; m < f.size(); ++m) out[m + 1] = f[m];
    if (blocks_.empty()) return out;

    // <f, theta_hat_n g_n> by boundary quadrature on the circle
    auto f_eval = [&f](cplx z) {
        cplx acc(0.0, 0.0);
        for (std::size_t m = f.size(); m-- > 0;) acc = acc * z + f[m];
        return acc;
    };
    CircleQuadratureOptions opts;
    opts.initial_grid = next_pow2(std::max<std::size_t>(4 * f.size(), 256));
    for (std::size_t n = 0; n < blocks_.size(); ++n) {
        cplx ip = circle_inner(f_eval, [this, n](cplx z) { return perturbation_right(n, z); },
                               opts);
        for (std::size_t m = 0; m < out_len && m < left_coeffs_[n].size(); ++m)
            out[m] += ip * left_coeffs_[n][m];
    }
    return out;
}

double PerturbedShiftModel::truncation_tail(std::size_t M) const {
    double tail = 0.0;
    for (std::size_t n = 0; n < blocks_.size(); ++n) {
        auto left = taylor_coefficients(
            [this, n](cplx z) { return perturbation_left(n, z); }, 2 * M);
        auto right = taylor_coefficients(
            [this, n](cplx z) { return perturbation_right(n, z); }, 2 * M);
        CompensatedSum s;
        for (std::size_t m = M; m < 2 * M; ++m) s.add(std::norm(left[m]) + std::norm(right[m]));
        tail += s.value();
    }
    return tail;
}

DiffNorms PerturbedShiftModel::stilde_minus_s_norms() const {
    DiffNorms out;
    out.rank = static_cast<int>(blocks_.size());
    CompensatedSum b212;
    for (const auto& blk : blocks_) b212.add(2.0 * std::sqrt(blk.measure().total_mass()));
    out.bound_212 = b212.value();
    if (blocks_.size() == 1) out.bound_47 = 2.0 * std::sqrt(blocks_[0].measure().total_mass());
    if (blocks_.empty()) return out;

    std::vector<std::function<cplx(cplx)>> fams;
    for (std::size_t n = 0; n < blocks_.size(); ++n)
        fams.push_back([this, n](cplx z) { return perturbation_left(n, z); });
    for (std::size_t n = 0; n < blocks_.size(); ++n)
        fams.push_back([this, n](cplx z) { return perturbation_right(n, z); });
    Eigen::MatrixXcd cross = circle_cross_matrix(fams);
    const auto nb = static_cast<Eigen::Index>(blocks_.size());
    Eigen::MatrixXcd gram_w = cross.topLeftCorner(nb, nb);
    Eigen::MatrixXcd gram_u = cross.bottomRightCorner(nb, nb);
    out.singular_values = detail::factored_singular_values(gram_w, gram_u);
    out.op_norm = out.singular_values.empty() ? 0.0 : out.singular_values.front();
    CompensatedSum s1;
    for (double s : out.singular_values) s1.add(s);
    out.s1_norm = s1.value();
    return out;
}

UnitaryBlockReport PerturbedShiftModel::unitary_block_check(double tol) const {
    UnitaryBlockReport rep;
    rep.tolerance = tol;
    const std::size_t K = flat_.size();
    const std::size_t N = blocks_.size();
    for (const auto& a : flat_) rep.expected_atoms.push_back(a.xi);
    if (K == 0) {
        rep.ok = true;
        return rep;
    }

    // Function list: basis (K), z*basis (K), right factors (N), left factors (N).
    std::vector<std::function<cplx(cplx)>> fs;
    for (std::size_t i = 0; i < K; ++i)
        fs.push_back([this, i](cplx z) { return basis(i, z); });
    for (std::size_t i = 0; i < K; ++i)
        fs.push_back([this, i](cplx z) { return z * basis(i, z); });
    for (std::size_t n = 0; n < N; ++n)
        fs.push_back([this, n](cplx z) { return perturbation_right(n, z); });
    for (std::size_t n = 0; n < N; ++n)
        fs.push_back([this, n](cplx z) { return perturbation_left(n, z); });
    Eigen::MatrixXcd cross = circle_cross_matrix(fs);

    const auto k = static_cast<Eigen::Index>(K);
    const auto nb = static_cast<Eigen::Index>(N);
    Eigen::MatrixXcd gram = cross.topLeftCorner(k, k);
    Eigen::MatrixXcd zb = cross.block(k, 0, k, k);          // <z b_a, b_b> at (a,b)
    Eigen::MatrixXcd pr = cross.block(0, 2 * k, k, nb);     // <b_a, right_n>
    Eigen::MatrixXcd lb = cross.block(2 * k + nb, 0, nb, k);  // <left_n, b_b>

    // compression <S~ b_a, b_b>, stored at (b, a) so columns act on b_a
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b)
            comp(b, a) = zb(a, b) + (pr.row(a) * lb.col(b)).value();

    Eigen::MatrixXcd gram_dev = gram - Eigen::MatrixXcd::Identity(k, k);
    rep.gram_max_dev = gram_dev.cwiseAbs().maxCoeff();
    Eigen::MatrixXcd diag_dev = comp;
    for (Eigen::Index i = 0; i < k; ++i) diag_dev(i, i) -= flat_[static_cast<std::size_t>(i)].xi;
    rep.compression_max_dev = diag_dev.cwiseAbs().maxCoeff();
    Eigen::Index wr, wc;
    diag_dev.cwiseAbs().maxCoeff(&wr, &wc);
    rep.worst_row = static_cast<int>(wr);
    rep.worst_col = static_cast<int>(wc);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
    for (Eigen::Index i = 0; i < k; ++i) rep.eigenvalues.push_back(es.eigenvalues()(i));

    // greedy matching of eigenvalues to the prescribed atom multiset
    std::vector<cplx> pool = rep.expected_atoms;
    double worst = 0.0;
    for (const cplx& ev : rep.eigenvalues) {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < pool.size(); ++j) {
            double d = std::abs(ev - pool[j]);
            if (d < bd) { bd = d; best = j; }
        }
        worst = std::max(worst, bd);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    }
    rep.eigenvalue_max_dev = worst;
    rep.ok = rep.gram_max_dev < tol && rep.compression_max_dev < tol &&
             rep.eigenvalue_max_dev < tol;
    return rep;
}

std::vector<cplx> PerturbedShiftModel::apply_phi_t_shift(double t, std::span<const cplx> f,
                                                         std::size_t out_degree) const {
    if (t < 0.0) throw std::invalid_argument("apply_phi_t: t must be >= 0");
    std::vector<cplx> phi = taylor_coefficients([t](cplx z) { return phi_t(t, z); }, out_degree);
    std::vector<cplx> out(out_degree, cplx(0.0, 0.0));
    for (std::size_t m = 0; m < out_degree; ++m) {
        CompensatedComplexSum acc;
        for (std::size_t j = 0; j <= m; ++j)
            if (m - j < f.size()) acc.add(phi[j] * f[m - j]);
        out[m] = acc.value();
    }
    return out;
}

std::vector<cplx> PerturbedShiftModel::apply_phi_t_stilde(double t, std::span<const cplx> f,
                                                          std::size_t out_degree) const {
    if (t < 0.0) throw std::invalid_argument("apply_phi_t: t must be >= 0");
    const std::size_t M = std::max(out_degree, std::max(f.size(), work_degree_));
    Eigen::MatrixXcd bc = basis_coefficients(M);
    Eigen::VectorXcd fv = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(M));
    for (std::size_t m = 0; m < f.size(); ++m) fv(static_cast<Eigen::Index>(m)) = f[m];

    Eigen::VectorXcd c = bc.adjoint() * fv;        // Clark coordinates of P_{K_theta} f
    Eigen::VectorXcd rem = fv - bc * c;            // component in theta H^2 (to truncation)
    std::vector<cplx> rem_v(rem.data(), rem.data() + rem.size());
    std::vector<cplx> out = apply_phi_t_shift(t, rem_v, out_degree);
    for (std::size_t i = 0; i < flat_.size(); ++i) {
        cplx factor = c(static_cast<Eigen::Index>(i)) * phi_t(t, flat_[i].xi);
        for (std::size_t m = 0; m < out_degree; ++m)
            out[m] += factor * bc(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i));
    }
    return out;
}

double PerturbedShiftModel::cogenerator_identity_check() const {
    double worst = 0.0;
    for (const auto& a : flat_) {
        cplx c = (a.xi + 1.0) / (a.xi - 1.0);  // purely imaginary for |xi| = 1
        double beta = std::abs(c.imag());
        const double t_max = 40.0;
        double width = std::min(0.5, kPi / (2.0 * std::max(beta, 1.0)));
        auto panels = static_cast<std::size_t>(std::ceil(t_max / width));
        if (panels > 2'000'000)
            throw std::runtime_error("cogenerator_identity_check: quadrature does not converge "
                                     "(atom too close to 1)");
        CompensatedComplexSum acc;
        for (std::size_t p = 0; p < panels; ++p) {
            double lo = t_max * static_cast<double>(p) / static_cast<double>(panels);
            double hi = t_max * static_cast<double>(p + 1) / static_cast<double>(panels);
            double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (int q = 0; q < 16; ++q) {
                double s = mid + half * GaussLegendre16::nodes[q];
                acc.add(half * GaussLegendre16::weights[q] * std::exp((c - 1.0) * s));
            }
        }
        cplx reconstructed = 1.0 - 2.0 * acc.value();
        worst = std::max(worst, std::abs(reconstructed - a.xi));
    }
    return worst;
}

Eigen::MatrixXcd PerturbedShiftModel::basis_coefficients(std::size_t M) const {
    Eigen::MatrixXcd bc(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(flat_.size()));
    for (std::size_t i = 0; i < flat_.size(); ++i) {
        auto coeffs = taylor_coefficients([this, i](cplx z) { return basis(i, z); }, M);
        for (std::size_t m = 0; m < M; ++m)
            bc(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) = coeffs[m];
    }
    return bc;
}

TruncatedOperator matrix_truncation(const PerturbedShiftModel& model, OperatorKind kind,
                                    double t, std::size_t M) {
    TruncatedOperator op;
    op.degree = static_cast<int>(M);
    const auto mi = static_cast<Eigen::Index>(M);
    op.matrix = Eigen::MatrixXcd::Zero(mi, mi);

    switch (kind) {
        case OperatorKind::Shift:
            for (Eigen::Index i = 0; i + 1 < mi; ++i) op.matrix(i + 1, i) = 1.0;
            return op;
        case OperatorKind::PerturbedShift: {
            for (Eigen::Index i = 0; i + 1 < mi; ++i) op.matrix(i + 1, i) = 1.0;
            for (std::size_t n = 0; n < model.block_count(); ++n) {
                auto left = taylor_coefficients(
                    [&model, n](cplx z) { return model.perturbation_left(n, z); }, 2 * M);
                auto right = taylor_coefficients(
                    [&model, n](cplx z) { return model.perturbation_right(n, z); }, 2 * M);
                for (std::size_t r = 0; r < M; ++r)
                    for (std::size_t c = 0; c < M; ++c)
                        op.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +=
                            left[r] * std::conj(right[c]);
                for (std::size_t m = M; m < 2 * M; ++m)
                    op.tail_mass += std::norm(left[m]) + std::norm(right[m]);
            }
            return op;
        }
        case OperatorKind::PhiShift: {
            auto phi = taylor_coefficients([t](cplx z) { return phi_t(t, z); }, 2 * M);
            for (Eigen::Index c = 0; c < mi; ++c)
                for (Eigen::Index r = c; r < mi; ++r)
                    op.matrix(r, c) = phi[static_cast<std::size_t>(r - c)];
            for (std::size_t m = M; m < 2 * M; ++m) op.tail_mass += std::norm(phi[m]);
            return op;
        }
        case OperatorKind::PhiPerturbedShift: {
            op = matrix_truncation(model, OperatorKind::PhiShift, t, M);
            for (std::size_t i = 0; i < model.atoms().size(); ++i) {
                cplx phi_at_atom = phi_t(t, model.atoms()[i].xi);
                auto bcoef = taylor_coefficients(
                    [&model, i](cplx z) { return model.basis(i, z); }, 2 * M);
                auto wcoef = taylor_coefficients(
                    [&model, i, t, phi_at_atom](cplx z) {
                        return (phi_at_atom - phi_t(t, z)) * model.basis(i, z);
                    },
                    2 * M);
                for (std::size_t r = 0; r < M; ++r)
                    for (std::size_t c = 0; c < M; ++c)
                        op.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +=
                            wcoef[r] * std::conj(bcoef[c]);
                for (std::size_t m = M; m < 2 * M; ++m)
                    op.tail_mass += std::norm(bcoef[m]) + std::norm(wcoef[m]);
            }
            return op;
        }
    }
    throw std::logic_error("matrix_truncation: unknown operator kind");
}

std::string truncated_matrix_csv(const TruncatedOperator& op) {
    std::ostringstream os;
    os.precision(17);
    os << "row,col,re,im\n";
    for (Eigen::Index r = 0; r < op.matrix.rows(); ++r)
        for (Eigen::Index c = 0; c < op.matrix.cols(); ++c)
            os << r << "," << c << "," << op.matrix(r, c).real() << ","
               << op.matrix(r, c).imag() << "\n";
    return os.str();
}

}  // namespace shiftpert
