#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "shiftpert/model_ops.hpp"

using namespace shiftpert;

namespace {
CircleMeasure single(double angle_over_pi, double w) {
    return CircleMeasure::from_angles({{angle_over_pi, w}});
}

double coeff_dev(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        cplx va = i < a.size() ? a[i] : cplx(0.0, 0.0);
        cplx vb = i < b.size() ? b[i] : cplx(0.0, 0.0);
        d = std::max(d, std::abs(va - vb));
    }
    return d;
}
}  // namespace

TEST_CASE("taylor coefficients") {
    auto c = taylor_coefficients([](cplx z) { return 1.0 + z; }, 6);
    CHECK(std::abs(c[0] - 1.0) < 1e-12);
    CHECK(std::abs(c[1] - 1.0) < 1e-12);
    for (int m = 2; m < 6; ++m) CHECK(std::abs(c[m]) < 1e-12);

    // geometric series 1/(1 - a z)
    cplx a(0.4, 0.3);
    auto g = taylor_coefficients([a](cplx z) { return 1.0 / (1.0 - a * z); }, 24);
    for (int m = 0; m < 24; ++m) CHECK(std::abs(g[m] - std::pow(a, m)) < 1e-10);
}

TEST_CASE("perturbed shift action") {
    PerturbedShiftModel model({single(1.0, 1.0)}, 32, 64);
    SUBCASE("constant one maps to the constant -1") {
        std::vector<cplx> one{cplx(1.0, 0.0)};
        auto out = model.apply_stilde(one);
        CHECK(std::abs(out[0] + 1.0) < 1e-10);
        for (std::size_t m = 1; m < out.size(); ++m) CHECK(std::abs(out[m]) < 1e-10);
    }
    SUBCASE("zero maps to zero") {
        std::vector<cplx> zero{cplx(0.0, 0.0), cplx(0.0, 0.0)};
        for (cplx v : model.apply_stilde(zero)) CHECK(std::abs(v) < 1e-12);
    }
    SUBCASE("acts as the plain shift on theta z^m") {
        PerturbedShiftModel m2({CircleMeasure::from_angles({{0.75, 0.5}, {-0.25, 1.5}})}, 32, 128);
        auto theta_fn = [&](cplx z) { return m2.theta_total(z); };
        for (std::size_t m = 0; m < 5; ++m) {
            auto fin = taylor_coefficients([&](cplx z) { return theta_fn(z) * std::pow(z, m); }, 96);
            auto expect =
                taylor_coefficients([&](cplx z) { return theta_fn(z) * std::pow(z, m + 1); }, 128);
            CHECK(coeff_dev(m2.apply_stilde(fin), expect) < 1e-8);
        }
    }
}

TEST_CASE("difference norms") {
    SUBCASE("unit atom at -1: rank one, norm sqrt(2)") {
        PerturbedShiftModel model({single(1.0, 1.0)});
        DiffNorms n = model.stilde_minus_s_norms();
        CHECK(n.rank == 1);
        CHECK(n.op_norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
        CHECK(n.s1_norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
        CHECK(n.bound_47 == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(n.op_norm < n.bound_47);
    }
    SUBCASE("small mass stays below the mass bound") {
        PerturbedShiftModel model({single(1.0, 0.25)});
        DiffNorms n = model.stilde_minus_s_norms();
        CHECK(n.op_norm < 1.0);
        CHECK(n.bound_47 == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("two unit-mass blocks stay below the block-sum bound") {
        PerturbedShiftModel model({single(1.0, 1.0), single(0.5, 1.0)});
        DiffNorms n = model.stilde_minus_s_norms();
        CHECK(n.rank == 2);
        CHECK(n.s1_norm < 4.0);
        CHECK(n.bound_212 == doctest::Approx(4.0).epsilon(1e-15));
    }
}

TEST_CASE("unitary block") {
    SUBCASE("two blocks, eigenvalues are the atoms") {
        PerturbedShiftModel model({single(1.0, 1.0), single(0.5, 1.0)});
        UnitaryBlockReport r = model.unitary_block_check();
        CHECK(r.ok);
        CHECK(r.gram_max_dev < 1e-8);
        CHECK(r.compression_max_dev < 1e-8);
        CHECK(r.eigenvalue_max_dev < 1e-8);
        REQUIRE(r.eigenvalues.size() == 2);
    }
    SUBCASE("single block with two atoms") {
        PerturbedShiftModel model({CircleMeasure::from_angles({{0.75, 0.5}, {-0.25, 1.5}})});
        UnitaryBlockReport r = model.unitary_block_check();
        CHECK(r.ok);
        CHECK(r.eigenvalue_max_dev < 1e-8);
    }
    SUBCASE("empty model is vacuously fine") {
        PerturbedShiftModel model({});
        UnitaryBlockReport r = model.unitary_block_check();
        CHECK(r.ok);
        CHECK(r.eigenvalues.empty());
    }
}

TEST_CASE("functional calculus") {
    PerturbedShiftModel model({single(1.0, 1.0), single(0.5, 1.0)}, 32, 128);
    double t = 1.25;
    SUBCASE("Clark basis vectors are eigenvectors of phi_t(S~)") {
        Eigen::MatrixXcd bc = model.basis_coefficients(128);
        for (std::size_t i = 0; i < model.total_rank(); ++i) {
            std::vector<cplx> f(bc.rows());
            for (Eigen::Index r = 0; r < bc.rows(); ++r) f[r] = bc(r, i);
            auto out = model.apply_phi_t_stilde(t, f, 128);
            cplx lambda = phi_t(t, model.atoms()[i].xi);
            double dev = 0.0;
            for (std::size_t r = 0; r < out.size(); ++r) {
                cplx expect = r < f.size() ? lambda * f[r] : cplx(0.0, 0.0);
                dev = std::max(dev, std::abs(out[r] - expect));
            }
            CHECK(dev < 1e-7);
        }
    }
    SUBCASE("t = 0 is the identity") {
        std::vector<cplx> f{cplx(1.0, 0.0), cplx(0.5, -0.25), cplx(0.0, 0.3)};
        CHECK(coeff_dev(model.apply_phi_t_stilde(0.0, f, 16), f) < 1e-12);
        CHECK(coeff_dev(model.apply_phi_t_shift(0.0, f, 16), f) < 1e-12);
        CHECK_THROWS_AS(model.apply_phi_t_shift(-1.0, f, 16), std::invalid_argument);
    }
    SUBCASE("the difference annihilates the invariant half space") {
        auto theta_fn = [&](cplx z) { return model.theta_total(z); };
        for (std::size_t m = 0; m < 4; ++m) {
            auto f = taylor_coefficients([&](cplx z) { return theta_fn(z) * std::pow(z, m); }, 96);
            auto a = model.apply_phi_t_stilde(t, f, 128);
            auto b = model.apply_phi_t_shift(t, f, 128);
            CHECK(coeff_dev(a, b) < 1e-7);
        }
    }
}

TEST_CASE("cogenerator identity") {
    CHECK(PerturbedShiftModel({single(0.5, 1.0)}).cogenerator_identity_check() < 1e-10);
    CHECK(PerturbedShiftModel({single(1.0, 1.0)}).cogenerator_identity_check() < 1e-10);
    CHECK(PerturbedShiftModel({CircleMeasure::from_angles({{0.3, 1.0}, {1.7, 0.5}, {0.9, 2.0}})})
              .cogenerator_identity_check() < 1e-10);
}

TEST_CASE("matrix truncation") {
    PerturbedShiftModel model({single(1.0, 1.0)});
    SUBCASE("plain shift at M = 3") {
        TruncatedOperator op = matrix_truncation(model, OperatorKind::Shift, 0.0, 3);
        REQUIRE(op.matrix.rows() == 3);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                CHECK(std::abs(op.matrix(r, c) - (r == c + 1 ? 1.0 : 0.0)) < 1e-15);
    }
    SUBCASE("phi_0 of the shift is the identity") {
        TruncatedOperator op = matrix_truncation(model, OperatorKind::PhiShift, 0.0, 8);
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c)
                CHECK(std::abs(op.matrix(r, c) - (r == c ? 1.0 : 0.0)) < 1e-13);
    }
    SUBCASE("rank-one difference for the single atom at -1") {
        auto s = matrix_truncation(model, OperatorKind::Shift, 0.0, 16);
        auto st = matrix_truncation(model, OperatorKind::PerturbedShift, 0.0, 16);
        Eigen::MatrixXcd d = st.matrix - s.matrix;
        // difference column c is <z^c, g> (1 - theta) = -conj(g-coeff) (1 + z): only c = 0 acts
        CHECK(std::abs(d(0, 0) + 1.0) < 1e-9);
        CHECK(std::abs(d(1, 0) + 1.0) < 1e-9);
        for (int r = 2; r < 16; ++r) CHECK(std::abs(d(r, 0)) < 1e-9);
        for (int c = 1; c < 16; ++c)
            for (int r = 0; r < 16; ++r) CHECK(std::abs(d(r, c)) < 1e-9);
        CHECK(Eigen::JacobiSVD<Eigen::MatrixXcd>(d).singularValues()(0) ==
              doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
    }
    SUBCASE("columns of the truncated perturbed shift are nearly orthonormal") {
        PerturbedShiftModel m2({CircleMeasure::from_angles({{0.75, 0.5}, {-0.25, 1.5}})});
        double prev = 1e9;
        for (std::size_t M : {32, 64, 128, 256}) {
            auto st = matrix_truncation(m2, OperatorKind::PerturbedShift, 0.0, M);
            Eigen::MatrixXcd g = st.matrix.adjoint() * st.matrix;
            double dev = 0.0;
            Eigen::Index half = static_cast<Eigen::Index>(M / 2);
            for (Eigen::Index c = 0; c < half; ++c)
                for (Eigen::Index r = 0; r < half; ++r)
                    dev = std::max(dev, std::abs(g(r, c) - (r == c ? 1.0 : 0.0)));
            CHECK(dev <= prev * (1.0 + 1e-9) + 1e-14);
            prev = dev;
        }
        CHECK(prev < 1e-5);
    }
    SUBCASE("csv export shape") {
        TruncatedOperator op = matrix_truncation(model, OperatorKind::Shift, 0.0, 2);
        std::string csv = truncated_matrix_csv(op);
        CHECK(csv.find("row,col,re,im") == 0);
        CHECK(csv.find("1,0,1") != std::string::npos);
    }
}

TEST_CASE("model construction limits") {
    std::vector<CircleMeasure> many(3, single(1.0, 1.0));
    CHECK_THROWS_AS(PerturbedShiftModel(many, 2), std::invalid_argument);
    // duplicate support across blocks is allowed; within a block it is not
    CHECK_NOTHROW(PerturbedShiftModel({single(1.0, 1.0), single(1.0, 1.0)}));
}
