#ifndef SHIFTPERT_MEASURES_HPP
#define SHIFTPERT_MEASURES_HPP

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "shiftpert/numerics.hpp"

namespace shiftpert {

struct CircleAtom {
    cplx point;     // unimodular, never 1
    double weight;  // > 0
};

// Finite atomic singular measure on the unit circle with no mass at 1.
// Immutable after construction.
class CircleMeasure {
public:
    CircleMeasure() = default;
    explicit CircleMeasure(std::vector<CircleAtom> atoms, double one_floor = 1e-9);

    static CircleMeasure from_angles(
        const std::vector<std::pair<double, double>>& angle_over_pi_and_weight,
        double one_floor = 1e-9);
    static CircleMeasure from_json(const nlohmann::json& j, double one_floor = 1e-9);
    nlohmann::json to_json() const;

    const std::vector<CircleAtom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    double total_mass() const;
    double one_floor() const { return one_floor_; }

    CircleMeasure scaled(double c) const;

private:
    std::vector<CircleAtom> atoms_;
    double one_floor_ = 1e-9;
};

struct LineAtom {
    double point;
    double mass;  // > 0
};

// Finite atomic measure on the real line, the Cayley image of a CircleMeasure.
class LineMeasure {
public:
    LineMeasure() = default;
    explicit LineMeasure(std::vector<LineAtom> atoms);

    const std::vector<LineAtom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    double total_mass() const;

    // Masses of the half-open bins [n, n+1), nonempty bins only.
    std::map<long, double> bin_masses() const;

    nlohmann::json to_json() const;
    static LineMeasure from_json(const nlohmann::json& j);

private:
    std::vector<LineAtom> atoms_;
};

// zeta = i(1+xi)/(1-xi), m = pi(1+zeta^2) w.
LineMeasure cayley_measure(const CircleMeasure& mu);

// Inverse transport: xi = (zeta-i)/(zeta+i), w = m/(pi(1+zeta^2)).
CircleMeasure inverse_cayley_measure(const LineMeasure& nu, double one_floor = 1e-9);

// sum_k w_k / |1-xi_k|^q
double moment_integral(const CircleMeasure& mu, double q);

// sum_n nu([n,n+1))^{p/2} over nonempty bins
double parfenov_sum(const LineMeasure& nu, double p);

// sum_n (int_{gamma_n} dmu/|1-xi|^2)^{p/2} with the half-open arc partition
// gamma_n = {e^{i phi}: pi/(n+1) < phi <= pi/n} for n > 0 and the mirror
// arcs [-pi/|n|, -pi/(|n|+1)) for n < 0.
double arc_binned_sum(const CircleMeasure& mu, double p);

struct ArcContribution {
    long arc_index;
    double angle_lo;    // lower |angle| bound of the arc
    double arc_mass;    // int_{gamma_n} dmu/|1-xi|^2
    double contribution;  // arc_mass^{p/2}
};
std::vector<ArcContribution> arc_binned_contributions(const CircleMeasure& mu, double p);

struct BinContribution {
    long bin_index;
    double bin_lo;
    double bin_mass;
    double contribution;  // bin_mass^{p/2}
};
std::vector<BinContribution> parfenov_contributions(const LineMeasure& nu, double p);

// Rescales {mu_n} by c_n = c0 4^{-n} with c0 solved so that
// 2 sum_n sqrt(c_n mu_n(T)) < eps; atom positions are unchanged.
std::vector<CircleMeasure> thm1_rescale(const std::vector<CircleMeasure>& measures,
                                        double eps, double q);

}  // namespace shiftpert

#endif
