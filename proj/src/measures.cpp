#include "shiftpert/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace shiftpert {

namespace {

void check_pairwise_distinct_circle(const std::vector<CircleAtom>& atoms) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = i + 1; j < atoms.size(); ++j)
            if (std::abs(atoms[i].point - atoms[j].point) == 0.0)
                throw std::invalid_argument("CircleMeasure: atom points must be pairwise distinct");
}

}  // namespace

CircleMeasure::CircleMeasure(std::vector<CircleAtom> atoms, double one_floor)
    : atoms_(std::move(atoms)), one_floor_(one_floor) {
    for (auto& a : atoms_) {
        double r = std::abs(a.point);
        if (r == 0.0 || !std::isfinite(r))
            throw std::invalid_argument("CircleMeasure: atom point must be a nonzero finite complex number");
        a.point /= r;
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
            throw std::invalid_argument("CircleMeasure: weights must be strictly positive and finite");
        if (std::abs(a.point - cplx(1.0, 0.0)) <= one_floor_)
            throw std::invalid_argument("CircleMeasure: atom too close to the point 1");
    }
    check_pairwise_distinct_circle(atoms_);
}

CircleMeasure CircleMeasure::from_angles(
    const std::vector<std::pair<double, double>>& angle_over_pi_and_weight,
    double one_floor) {
    std::vector<CircleAtom> atoms;
    atoms.reserve(angle_over_pi_and_weight.size());
    for (const auto& [a, w] : angle_over_pi_and_weight)
        atoms.push_back({unit_from_angle_over_pi(a), w});
    return CircleMeasure(std::move(atoms), one_floor);
}

CircleMeasure CircleMeasure::from_json(const nlohmann::json& j, double one_floor) {
    std::vector<std::pair<double, double>> spec;
    for (const auto& atom : j.at("atoms"))
        spec.emplace_back(atom.at("angle_over_pi").get<double>(),
                          atom.at("weight").get<double>());
    return from_angles(spec, one_floor);
}

nlohmann::json CircleMeasure::to_json() const {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : atoms_) {
        atoms.push_back({{"angle_over_pi", std::atan2(a.point.imag(), a.point.real()) / kPi},
                         {"weight", a.weight}});
    }
    return {{"atoms", atoms}};
}

double CircleMeasure::total_mass() const {
    CompensatedSum s;
    for (const auto& a : atoms_) s.add(a.weight);
    return s.value();
}

CircleMeasure CircleMeasure::scaled(double c) const {
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("CircleMeasure::scaled: factor must be positive and finite");
    std::vector<CircleAtom> atoms = atoms_;
    for (auto& a : atoms) a.weight *= c;
    return CircleMeasure(std::move(atoms), one_floor_);
}

LineMeasure::LineMeasure(std::vector<LineAtom> atoms) : atoms_(std::move(atoms)) {
    for (const auto& a : atoms_) {
        if (!std::isfinite(a.point))
            throw std::invalid_argument("LineMeasure: atom points must be finite");
        if (!(a.mass > 0.0) || !std::isfinite(a.mass))
            throw std::invalid_argument("LineMeasure: masses must be strictly positive and finite");
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        for (std::size_t j = i + 1; j < atoms_.size(); ++j)
            if (atoms_[i].point == atoms_[j].point)
                throw std::invalid_argument("LineMeasure: atom points must be pairwise distinct");
}

double LineMeasure::total_mass() const {
    CompensatedSum s;
    for (const auto& a : atoms_) s.add(a.mass);
    return s.value();
}

std::map<long, double> LineMeasure::bin_masses() const {
    std::map<long, CompensatedSum> acc;
    for (const auto& a : atoms_)
        acc[static_cast<long>(std::floor(a.point))].add(a.mass);
    std::map<long, double> out;
    for (const auto& [n, s] : acc) out[n] = s.value();
    return out;
}

nlohmann::json LineMeasure::to_json() const {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : atoms_)
        atoms.push_back({{"point", a.point}, {"mass", a.mass}});
    return {{"atoms", atoms}};
}

LineMeasure LineMeasure::from_json(const nlohmann::json& j) {
    std::vector<LineAtom> atoms;
    for (const auto& atom : j.at("atoms"))
        atoms.push_back({atom.at("point").get<double>(), atom.at("mass").get<double>()});
    return LineMeasure(std::move(atoms));
}

LineMeasure cayley_measure(const CircleMeasure& mu) {
    std::vector<LineAtom> atoms;
    atoms.reserve(mu.size());
    for (const auto& a : mu.atoms()) {
        cplx d = cplx(1.0, 0.0) - a.point;
        if (std::abs(d) <= mu.one_floor())
            throw std::domain_error("cayley_measure: atom too close to 1, Cayley image ill-conditioned");
        cplx zc = cplx(0.0, 1.0) * (cplx(1.0, 0.0) + a.point) / d;
        double zeta = zc.real();  // imaginary part vanishes for |xi| = 1
        atoms.push_back({zeta, kPi * (1.0 + zeta * zeta) * a.weight});
    }
    return LineMeasure(std::move(atoms));
}

CircleMeasure inverse_cayley_measure(const LineMeasure& nu, double one_floor) {
    std::vector<CircleAtom> atoms;
    atoms.reserve(nu.size());
    for (const auto& a : nu.atoms()) {
        cplx xi = (cplx(a.point, 0.0) - cplx(0.0, 1.0)) / (cplx(a.point, 0.0) + cplx(0.0, 1.0));
        atoms.push_back({xi, a.mass / (kPi * (1.0 + a.point * a.point))});
    }
    return CircleMeasure(std::move(atoms), one_floor);
}

double moment_integral(const CircleMeasure& mu, double q) {
    if (q < 0.0) throw std::invalid_argument("moment_integral: q must be >= 0");
    CompensatedSum s;
    for (const auto& a : mu.atoms())
        s.add(a.weight / std::pow(std::abs(cplx(1.0, 0.0) - a.point), q));
    return s.value();
}

std::vector<BinContribution> parfenov_contributions(const LineMeasure& nu, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("parfenov_sum: p must be > 0");
    std::vector<BinContribution> out;
    for (const auto& [n, mass] : nu.bin_masses())
        out.push_back({n, static_cast<double>(n), mass, std::pow(mass, p / 2.0)});
    return out;
}

double parfenov_sum(const LineMeasure& nu, double p) {
    CompensatedSum s;
    for (const auto& c : parfenov_contributions(nu, p)) s.add(c.contribution);
    return s.value();
}

namespace {

// Arc index for angle phi in (-pi, pi], phi != 0: positive arcs are
// (pi/(n+1), pi/n], negative arcs mirror them as [-pi/n, -pi/(n+1)).
long arc_index_of_angle(double phi) {
    double r = kPi / std::abs(phi);
    double rn = std::nearbyint(r);
    if (std::abs(r - rn) < 1e-9 * rn) r = rn;
    long n = static_cast<long>(std::floor(r));
    return phi > 0.0 ? n : -n;
}

}  // namespace

std::vector<ArcContribution> arc_binned_contributions(const CircleMeasure& mu, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("arc_binned_sum: p must be > 0");
    std::map<long, CompensatedSum> acc;
    for (const auto& a : mu.atoms()) {
        double phi = std::atan2(a.point.imag(), a.point.real());
        long n = arc_index_of_angle(phi);
        acc[n].add(a.weight / std::norm(cplx(1.0, 0.0) - a.point));
    }
    std::vector<ArcContribution> out;
    for (const auto& [n, s] : acc) {
        double lo = kPi / static_cast<double>(std::abs(n) + 1);
        out.push_back({n, lo, s.value(), std::pow(s.value(), p / 2.0)});
    }
    return out;
}

double arc_binned_sum(const CircleMeasure& mu, double p) {
    CompensatedSum s;
    for (const auto& c : arc_binned_contributions(mu, p)) s.add(c.contribution);
    return s.value();
}

std::vector<CircleMeasure> thm1_rescale(const std::vector<CircleMeasure>& measures,
                                        double eps, double q) {
    if (measures.empty()) throw std::invalid_argument("thm1_rescale: empty measure list");
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw std::invalid_argument("thm1_rescale: eps must be positive and finite");
    if (!(q > 3.0)) throw std::invalid_argument("thm1_rescale: q must be > 3");

    // Geometric damping c_n = c0 4^{-n}: the envelope keeps both the mass
    // series and the q-moment series summable for arbitrarily long lists.
    CompensatedSum s;
    double damp = 1.0;
    for (const auto& m : measures) {
        damp *= 0.5;
        s.add(damp * std::sqrt(m.total_mass()));
    }
    double denom = s.value();
    std::vector<CircleMeasure> out;
    out.reserve(measures.size());
    if (denom == 0.0) return measures;  // all-empty list: nothing to scale
    double sqrt_c0 = (eps / 4.0) / denom;
    double c0 = sqrt_c0 * sqrt_c0;
    double cn = c0;
    for (const auto& m : measures) {
        cn *= 0.25;
        out.push_back(m.empty() ? m : m.scaled(cn));
    }
    return out;
}

}  // namespace shiftpert
