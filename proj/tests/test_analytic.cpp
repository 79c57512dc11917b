#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "shiftpert/analytic.hpp"

using namespace shiftpert;

namespace {
CircleMeasure single(double angle_over_pi, double w) {
    return CircleMeasure::from_angles({{angle_over_pi, w}});
}

CircleMeasure random_measure(Rng& rng, int max_atoms) {
    for (;;) {
        int n = rng.uniform_int(1, max_atoms);
        std::vector<std::pair<double, double>> atoms;
        for (int i = 0; i < n; ++i)
            atoms.emplace_back(rng.uniform(0.05, 1.95), rng.uniform(0.05, 2.0));
        try {
            return CircleMeasure::from_angles(atoms);
        } catch (const std::invalid_argument&) {
        }
    }
}
}  // namespace

TEST_CASE("herglotz transform") {
    InnerFunctionModel f(single(1.0, 1.0));
    // R(z) = (1 - z)/(1 + z) for the unit atom at -1
    CHECK(std::abs(f.herglotz(cplx(0.5, 0.0)) - cplx(1.0 / 3.0, 0.0)) < 1e-15);
    CHECK(std::abs(f.herglotz(cplx(0.0, 0.0)) - cplx(1.0, 0.0)) < 1e-15);
    SUBCASE("positive real part on the disk") {
        Rng rng(21);
        for (int rep = 0; rep < 50; ++rep) {
            InnerFunctionModel g(random_measure(rng, 6));
            double r = rng.uniform(0.0, 0.999);
            double a = rng.uniform(0.0, 2.0 * kPi);
            CHECK(g.herglotz(std::polar(r, a)).real() > 0.0);
        }
    }
}

TEST_CASE("theta on the disk") {
    SUBCASE("unit atom at -1 gives theta(z) = -z") {
        InnerFunctionModel f(single(1.0, 1.0));
        for (cplx z : {cplx(0.3, 0.1), cplx(0.0, -0.5), cplx(0.0, 0.0), cplx(-0.99, 0.0)})
            CHECK(std::abs(f.theta(z).value - (-z)) < 1e-14);
        CHECK(std::abs(f.theta_at_zero()) < 1e-15);
        CHECK(std::abs(f.theta_at_one() - cplx(-1.0, 0.0)) < 1e-14);
    }
    SUBCASE("unit atom at i gives theta(z) = -i z") {
        InnerFunctionModel f(single(0.5, 1.0));
        for (cplx z : {cplx(0.3, 0.1), cplx(0.0, -0.5)})
            CHECK(std::abs(f.theta(z).value - cplx(0.0, -1.0) * z) < 1e-14);
        CHECK(std::abs(f.theta_at_one() - cplx(0.0, -1.0)) < 1e-14);
    }
    SUBCASE("empty measure gives theta = -1") {
        InnerFunctionModel f((CircleMeasure()));
        CHECK(std::abs(f.theta(cplx(0.3, 0.2)).value + 1.0) < 1e-15);
        CHECK(std::abs(f.theta_at_one() + 1.0) < 1e-15);
    }
    SUBCASE("boundary value 1 at every atom, flagged") {
        Rng rng(5);
        for (int rep = 0; rep < 10; ++rep) {
            CircleMeasure mu = random_measure(rng, 6);
            InnerFunctionModel f(mu);
            for (const auto& a : mu.atoms()) {
                FlaggedValue v = f.theta(a.point);
                CHECK(v.at_atom);
                CHECK(std::abs(v.value - 1.0) < 1e-12);
            }
        }
    }
    SUBCASE("inner: modulus below 1 inside, 1 on the boundary off the atoms") {
        Rng rng(9);
        for (int rep = 0; rep < 200; ++rep) {
            InnerFunctionModel f(random_measure(rng, 6));
            cplx z = std::polar(rng.uniform(0.0, 0.999), rng.uniform(0.0, 2.0 * kPi));
            CHECK(std::abs(f.theta(z).value) <= 1.0 + 1e-13);
            cplx b = std::polar(1.0, rng.uniform(0.0, 2.0 * kPi));
            FlaggedValue v = f.theta(b);
            if (!v.at_atom) CHECK(std::abs(std::abs(v.value) - 1.0) < 1e-10);
        }
    }
    SUBCASE("radial Clark convergence toward the atoms") {
        InnerFunctionModel f(
            InnerFunctionModel(CircleMeasure::from_angles({{0.75, 0.5}, {-0.25, 1.5}})));
        for (const auto& a : f.measure().atoms()) {
            double prev = 10.0;
            for (int k = 1; k <= 8; ++k) {
                double r = 1.0 - std::pow(10.0, -k);
                double dev = std::abs(f.theta(r * a.point).value - 1.0);
                CHECK(dev < prev);
                prev = dev;
            }
            CHECK(prev < 1e-7);
        }
    }
}

TEST_CASE("theta on the half plane") {
    InnerFunctionModel f(single(1.0, 1.0));  // Theta(x) = theta((x-i)/(x+i))
    CHECK(std::abs(f.theta_halfplane(cplx(0.0, 1.0))) < 1e-15);          // i maps to 0
    CHECK(std::abs(f.theta_halfplane(cplx(0.0, 0.0)) - 1.0) < 1e-12);    // the atom itself
    CHECK(std::abs(f.theta_halfplane(cplx(0.0, 1e9)) + 1.0) < 1e-8);     // infinity maps to 1

    SUBCASE("line-measure route agrees with the transported disk route") {
        Rng rng(13);
        for (int rep = 0; rep < 10; ++rep) {
            CircleMeasure mu = random_measure(rng, 5);
            InnerFunctionModel g(mu);
            LineMeasure nu = cayley_measure(mu);
            for (int j = 0; j < 10; ++j) {
                cplx x(rng.uniform(-20.0, 20.0), rng.uniform(0.05, 5.0));
                CHECK(std::abs(theta_halfplane_from_line(nu, x) - g.theta_halfplane(x)) < 1e-10);
            }
        }
    }
}

TEST_CASE("semigroup symbols") {
    double t = 0.7;
    CHECK(std::abs(phi_t(t, cplx(-1.0, 0.0)) - 1.0) < 1e-15);
    CHECK(std::abs(phi_t(2.0, cplx(0.0, 1.0)) - std::exp(cplx(0.0, -2.0))) < 1e-14);
    CHECK(std::abs(phi_t(0.0, cplx(0.3, 0.2)) - 1.0) < 1e-15);
    CHECK(std::abs(psi_t(t, cplx(3.0, 0.0)) - std::exp(cplx(0.0, 3.0 * t))) < 1e-15);
    CHECK_THROWS_AS(phi_t(1.0, cplx(1.0, 0.0)), std::domain_error);
    CHECK_THROWS_AS(phi_t(-1.0, cplx(0.0, 0.0)), std::invalid_argument);

    SUBCASE("pointwise semigroup law and unit modulus on the circle") {
        Rng rng(31);
        for (int rep = 0; rep < 100; ++rep) {
            cplx z = std::polar(1.0, rng.uniform(0.05, 1.95) * kPi);
            double a = rng.uniform(0.0, 3.0), b = rng.uniform(0.0, 3.0);
            CHECK(std::abs(phi_t(a, z) * phi_t(b, z) - phi_t(a + b, z)) < 1e-14);
            CHECK(std::abs(std::abs(phi_t(a, z)) - 1.0) < 1e-14);
            // conjugated by the Cayley map phi becomes the exponential psi
            double x = rng.uniform(-30.0, 30.0);
            cplx zx = (cplx(x, 0.0) - cplx(0.0, 1.0)) / (cplx(x, 0.0) + cplx(0.0, 1.0));
            CHECK(std::abs(phi_t(a, zx) - psi_t(a, cplx(x, 0.0))) < 1e-12);
        }
    }
}

TEST_CASE("Omega and g") {
    SUBCASE("unit atom at -1: constant one maps to 1") {
        InnerFunctionModel f(single(1.0, 1.0));
        std::vector<cplx> u{cplx(1.0, 0.0)};
        for (cplx z : {cplx(0.3, 0.1), cplx(-0.4, 0.2), cplx(0.0, 0.0)})
            CHECK(std::abs(f.omega_apply(u, z).value - 1.0) < 1e-13);
    }
    SUBCASE("zero maps to zero, conj(xi) reproduces g") {
        Rng rng(41);
        for (int rep = 0; rep < 10; ++rep) {
            CircleMeasure mu = random_measure(rng, 5);
            InnerFunctionModel f(mu);
            cplx z = std::polar(rng.uniform(0.0, 0.95), rng.uniform(0.0, 2.0 * kPi));
            std::vector<cplx> zero(mu.size(), cplx(0.0, 0.0));
            CHECK(std::abs(f.omega_apply(zero, z).value) < 1e-15);
            std::vector<cplx> xi_bar;
            for (const auto& a : mu.atoms()) xi_bar.push_back(std::conj(a.point));
            CHECK(std::abs(f.omega_apply(xi_bar, z).value - f.g(z)) < 1e-10);
        }
    }
    SUBCASE("fixtures for g") {
        InnerFunctionModel fm1(single(1.0, 1.0));
        CHECK(std::abs(fm1.g(cplx(0.3, 0.1)) + 1.0) < 1e-14);  // g = -1
        InnerFunctionModel fi(single(0.5, 1.0));
        CHECK(std::abs(fi.g(cplx(0.3, 0.1)) + cplx(0.0, 1.0)) < 1e-14);  // g = -i
    }
    SUBCASE("g(0) matches the derivative quotient") {
        Rng rng(43);
        for (int rep = 0; rep < 10; ++rep) {
            InnerFunctionModel f(random_measure(rng, 5));
            cplx expect = f.theta_prime(cplx(0.0, 0.0)) / (1.0 - f.theta_at_zero());
            CHECK(std::abs(f.g(cplx(0.0, 0.0)) - expect) < 1e-12);
        }
    }
    SUBCASE("Clark isometry") {
        Rng rng(47);
        for (int rep = 0; rep < 5; ++rep) {
            CircleMeasure mu = random_measure(rng, 4);
            InnerFunctionModel f(mu);
            std::vector<cplx> u;
            double massq = 0.0;
            for (const auto& a : mu.atoms()) {
                u.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
                massq += std::norm(u.back()) * a.weight;
            }
            double nsq = circle_normsq([&](cplx z) { return f.omega_apply(u, z).value; });
            CHECK(std::abs(nsq - massq) <= 1e-8 * std::max(massq, 1.0));
        }
    }
}

TEST_CASE("reproducing kernel at 1") {
    SUBCASE("unit atom at -1: kernel is the constant 1") {
        InnerFunctionModel f(single(1.0, 1.0));
        for (cplx z : {cplx(0.2, 0.1), cplx(-0.4, 0.3)})
            CHECK(std::abs(f.repkernel_one(z) - 1.0) < 1e-14);
        CHECK(f.repkernel_one_normsq_clark() == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("unit atom at i") {
        InnerFunctionModel f(single(0.5, 1.0));
        CHECK(f.repkernel_one_normsq_clark() == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("norm bound and the two evaluation routes agree") {
        Rng rng(53);
        for (int rep = 0; rep < 5; ++rep) {
            CircleMeasure mu = random_measure(rng, 4);
            InnerFunctionModel f(mu);
            double clark = f.repkernel_one_normsq_clark();
            double quad = f.repkernel_one_normsq_quadrature();
            CHECK(std::abs(clark - quad) <= 1e-8 * std::max(clark, 1.0));
            CHECK(clark < 4.0 * moment_integral(mu, 2.0) + 1e-12);
        }
    }
}

TEST_CASE("circle quadrature") {
    // monomials are orthonormal in H^2
    std::vector<std::function<cplx(cplx)>> fs;
    for (int m = 0; m < 4; ++m)
        fs.emplace_back([m](cplx z) { return std::pow(z, m); });
    Eigen::MatrixXcd g = circle_gram(fs);
    for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q)
            CHECK(std::abs(g(p, q) - (p == q ? 1.0 : 0.0)) < 1e-12);
    CHECK(std::abs(circle_mean([](cplx z) { return z * std::conj(z); }) - 1.0) < 1e-13);
}
