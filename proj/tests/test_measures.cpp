#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "shiftpert/measures.hpp"

using namespace shiftpert;

namespace {
CircleMeasure single(double angle_over_pi, double w) {
    return CircleMeasure::from_angles({{angle_over_pi, w}});
}
}  // namespace

TEST_CASE("construction invariants") {
    CHECK_THROWS_AS(single(0.0, 1.0), std::invalid_argument);  // atom at 1
    CHECK_THROWS_AS(single(1.0, 0.0), std::invalid_argument);  // weight not positive
    CHECK_THROWS_AS(single(1.0, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(CircleMeasure::from_angles({{1.0, 1.0}, {1.0, 0.5}}),
                    std::invalid_argument);  // duplicate points
    // configurable floor around 1
    CHECK_THROWS_AS(single(1e-12, 1.0), std::invalid_argument);
    CHECK_NOTHROW(CircleMeasure::from_angles({{1e-3, 1.0}}, 1e-6));

    CircleMeasure mu = CircleMeasure::from_angles({{1.0, 1.0}, {0.5, 0.25}});
    CHECK(mu.size() == 2);
    CHECK(mu.total_mass() == doctest::Approx(1.25).epsilon(1e-15));
    for (const auto& a : mu.atoms()) CHECK(std::abs(std::abs(a.point) - 1.0) < 1e-14);
}

TEST_CASE("line measure invariants") {
    CHECK_THROWS_AS(LineMeasure({{0.0, 1.0}, {0.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(LineMeasure({{0.0, 0.0}}), std::invalid_argument);
    LineMeasure nu({{0.2, 4.0}, {0.7, 5.0}, {3.5, 9.0}});
    double bins_total = 0.0;
    for (const auto& [n, m] : nu.bin_masses()) bins_total += m;
    CHECK(bins_total == doctest::Approx(nu.total_mass()).epsilon(1e-15));
    CHECK(nu.bin_masses().at(0) == doctest::Approx(9.0));
    CHECK(nu.bin_masses().at(3) == doctest::Approx(9.0));
}

TEST_CASE("cayley transport") {
    SUBCASE("atom at -1") {
        LineMeasure nu = cayley_measure(single(1.0, 1.0));
        REQUIRE(nu.size() == 1);
        CHECK(nu.atoms()[0].point == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(nu.atoms()[0].mass == doctest::Approx(kPi).epsilon(1e-15));
    }
    SUBCASE("atom at i") {
        LineMeasure nu = cayley_measure(single(0.5, 1.0));
        REQUIRE(nu.size() == 1);
        CHECK(nu.atoms()[0].point == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(nu.atoms()[0].mass == doctest::Approx(2.0 * kPi).epsilon(1e-14));
    }
    SUBCASE("empty measure") {
        LineMeasure nu = cayley_measure(CircleMeasure{});
        CHECK(nu.empty());
        CHECK(nu.total_mass() == 0.0);
    }
    SUBCASE("total mass identity, random measures up to 64 atoms") {
        Rng rng(7);
        for (int rep = 0; rep < 20; ++rep) {
            int n = rng.uniform_int(1, 64);
            std::vector<std::pair<double, double>> atoms;
            for (int i = 0; i < n; ++i)
                atoms.emplace_back(rng.uniform(0.01, 1.99), rng.uniform(0.01, 3.0));
            CircleMeasure mu;
            try {
                mu = CircleMeasure::from_angles(atoms);
            } catch (const std::invalid_argument&) {
                continue;  // rare duplicate draw
            }
            double lhs = cayley_measure(mu).total_mass();
            double rhs = 4.0 * kPi * moment_integral(mu, 2.0);
            CHECK(std::abs(lhs - rhs) <= 1e-10 * rhs);
        }
    }
    SUBCASE("inverse transport round trip") {
        CircleMeasure mu = CircleMeasure::from_angles({{1.0, 1.0}, {0.5, 0.25}, {-0.3, 2.0}});
        CircleMeasure back = inverse_cayley_measure(cayley_measure(mu));
        REQUIRE(back.size() == mu.size());
        CHECK(back.total_mass() == doctest::Approx(mu.total_mass()).epsilon(1e-12));
    }
}

TEST_CASE("moment integral") {
    CHECK(moment_integral(single(1.0, 1.0), 2.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(moment_integral(single(1.0, 1.0), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(moment_integral(single(0.5, 1.0), 2.0) == doctest::Approx(0.5).epsilon(1e-14));
    // single-atom closed form w/|1-xi|^q at several exponents
    CircleMeasure mu = single(0.25, 0.7);
    double d = std::abs(1.0 - mu.atoms()[0].point);
    for (double q : {0.5, 1.0, 2.0, 3.5, 4.0})
        CHECK(moment_integral(mu, q) == doctest::Approx(0.7 / std::pow(d, q)).epsilon(1e-13));
}

TEST_CASE("parfenov binning") {
    LineMeasure nu0({{0.0, kPi}});
    CHECK(parfenov_sum(nu0, 2.0) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(parfenov_sum(nu0, 1.0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-15));
    LineMeasure nu({{0.2, 4.0}, {0.7, 5.0}, {3.5, 9.0}});
    CHECK(parfenov_sum(nu, 1.0) == doctest::Approx(6.0).epsilon(1e-15));

    SUBCASE("p = 2 collapses to total mass") {
        Rng rng(11);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<LineAtom> atoms;
            int n = rng.uniform_int(1, 30);
            for (int i = 0; i < n; ++i)
                atoms.push_back({rng.uniform(-50.0, 50.0), rng.uniform(0.01, 2.0)});
            LineMeasure m(atoms);
            CHECK(parfenov_sum(m, 2.0) ==
                  doctest::Approx(m.total_mass()).epsilon(1e-13));
        }
    }
    SUBCASE("contributions table is consistent") {
        auto rows = parfenov_contributions(nu, 1.0);
        double total = 0.0;
        for (const auto& r : rows) total += r.contribution;
        CHECK(total == doctest::Approx(parfenov_sum(nu, 1.0)).epsilon(1e-14));
    }
}

TEST_CASE("arc binned sum") {
    CHECK(arc_binned_sum(single(1.0, 1.0), 2.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(arc_binned_sum(single(0.5, 1.0), 2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CircleMeasure pm_i = CircleMeasure::from_angles({{0.5, 1.0}, {-0.5, 1.0}});
    CHECK(arc_binned_sum(pm_i, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    SUBCASE("arc membership of the fixtures") {
        auto rows = arc_binned_contributions(single(1.0, 1.0), 2.0);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].arc_index == 1);
        rows = arc_binned_contributions(single(0.5, 1.0), 2.0);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].arc_index == 2);
        rows = arc_binned_contributions(single(-0.5, 1.0), 2.0);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].arc_index == -2);
    }
}

TEST_CASE("targeted weight rescaler") {
    SUBCASE("single measure, eps = 1") {
        auto out = thm1_rescale({single(1.0, 1.0)}, 1.0, 4.0);
        REQUIRE(out.size() == 1);
        CHECK(out[0].total_mass() <= 1.0 / 16.0 + 1e-15);
        CHECK(2.0 * std::sqrt(out[0].total_mass()) < 1.0);
        // support unchanged
        CHECK(std::abs(out[0].atoms()[0].point - cplx(-1.0, 0.0)) < 1e-15);
    }
    SUBCASE("two copies, eps = 0.2") {
        auto out = thm1_rescale({single(1.0, 1.0), single(1.0, 1.0)}, 0.2, 4.0);
        double s = 0.0;
        for (const auto& m : out) s += std::sqrt(m.total_mass());
        CHECK(s < 0.1);
        CHECK(2.0 * s < 0.2);
    }
    SUBCASE("rescale bound holds for random lists") {
        Rng rng(3);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<CircleMeasure> ms;
            int nblocks = rng.uniform_int(1, 5);
            for (int b = 0; b < nblocks; ++b)
                ms.push_back(single(rng.uniform(0.1, 1.9), rng.uniform(0.1, 5.0)));
            double eps = rng.uniform(0.01, 2.0);
            auto out = thm1_rescale(ms, eps, 3.5);
            double s = 0.0;
            for (const auto& m : out) s += std::sqrt(m.total_mass());
            CHECK(2.0 * s < eps);
        }
    }
    SUBCASE("invalid eps rejected") {
        CHECK_THROWS_AS(thm1_rescale({single(1.0, 1.0)}, 0.0, 4.0), std::invalid_argument);
        CHECK_THROWS_AS(
            thm1_rescale({single(1.0, 1.0)},
                         std::numeric_limits<double>::infinity(), 4.0),
            std::invalid_argument);
        CHECK_THROWS_AS(thm1_rescale({}, 1.0, 4.0), std::invalid_argument);
    }
}

TEST_CASE("json round trip") {
    nlohmann::json j = {
        {"atoms",
         {{{"angle_over_pi", -1.0}, {"weight", 1.0}}, {{"angle_over_pi", 0.5}, {"weight", 0.25}}}}};
    CircleMeasure mu = CircleMeasure::from_json(j);
    CHECK(mu.size() == 2);
    CircleMeasure back = CircleMeasure::from_json(mu.to_json());
    CHECK(back.total_mass() == doctest::Approx(mu.total_mass()).epsilon(1e-15));

    LineMeasure nu({{0.5, 2.0}});
    LineMeasure nu2 = LineMeasure::from_json(nu.to_json());
    CHECK(nu2.atoms()[0].point == 0.5);
    CHECK(nu2.atoms()[0].mass == 2.0);
}
