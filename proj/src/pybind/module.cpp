#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "shiftpert/analytic.hpp"
#include "shiftpert/experiments.hpp"
#include "shiftpert/measures.hpp"
#include "shiftpert/model_ops.hpp"
#include "shiftpert/schatten.hpp"

namespace py = pybind11;
using namespace shiftpert;

namespace {

const char* method_name(SpectrumMethod m) {
    switch (m) {
        case SpectrumMethod::ClosedFormGram: return "closed-form-gram";
        case SpectrumMethod::QuadratureGram: return "quadrature-gram";
        case SpectrumMethod::FiniteSection: return "finite-section";
    }
    return "?";
}

py::dict diff_norms_dict(const DiffNorms& d) {
    py::dict out;
    out["op_norm"] = d.op_norm;
    out["s1_norm"] = d.s1_norm;
    out["rank"] = d.rank;
    out["bound_47"] = d.bound_47;
    out["bound_212"] = d.bound_212;
    out["singular_values"] = d.singular_values;
    return out;
}

py::dict unitary_dict(const UnitaryBlockReport& r) {
    py::dict out;
    out["gram_max_dev"] = r.gram_max_dev;
    out["compression_max_dev"] = r.compression_max_dev;
    out["eigenvalue_max_dev"] = r.eigenvalue_max_dev;
    out["eigenvalues"] = r.eigenvalues;
    out["expected_atoms"] = r.expected_atoms;
    out["ok"] = r.ok;
    return out;
}

py::list bound_list(const std::vector<BoundCheck>& checks) {
    py::list out;
    for (const auto& c : checks) {
        py::dict d;
        d["id"] = c.id;
        d["lhs"] = c.lhs;
        d["rhs"] = c.rhs;
        d["satisfied"] = c.satisfied;
        d["asserted"] = c.asserted;
        d["fitted_constant"] = c.fitted_constant;
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_shiftpert, m) {
    m.doc() = "Schatten-class shift perturbations from atomic Clark measures";

    py::class_<SingularSpectrum>(m, "SingularSpectrum")
        .def_readonly("values", &SingularSpectrum::values)
        .def_readonly("error_estimate", &SingularSpectrum::error_estimate)
        .def_property_readonly(
            "method", [](const SingularSpectrum& s) { return method_name(s.method); })
        .def("__len__", [](const SingularSpectrum& s) { return s.values.size(); });

    py::class_<CircleMeasure>(m, "CircleMeasure")
        .def(py::init([](const std::vector<std::pair<double, double>>& atoms) {
                 return CircleMeasure::from_angles(atoms);
             }),
             py::arg("angle_over_pi_and_weight"))
        .def_static("from_json", [](const std::string& s) {
            return CircleMeasure::from_json(nlohmann::json::parse(s));
        })
        .def("to_json", [](const CircleMeasure& mu) { return mu.to_json().dump(); })
        .def("atoms",
             [](const CircleMeasure& mu) {
                 std::vector<std::pair<cplx, double>> out;
                 for (const auto& a : mu.atoms()) out.emplace_back(a.point, a.weight);
                 return out;
             })
        .def("total_mass", &CircleMeasure::total_mass)
        .def("scaled", &CircleMeasure::scaled)
        .def("__len__", &CircleMeasure::size);

    py::class_<LineMeasure>(m, "LineMeasure")
        .def(py::init([](const std::vector<std::pair<double, double>>& atoms) {
                 std::vector<LineAtom> la;
                 for (const auto& [p, w] : atoms) la.push_back({p, w});
                 return LineMeasure(la);
             }),
             py::arg("point_and_mass"))
        .def("atoms",
             [](const LineMeasure& nu) {
                 std::vector<std::pair<double, double>> out;
                 for (const auto& a : nu.atoms()) out.emplace_back(a.point, a.mass);
                 return out;
             })
        .def("total_mass", &LineMeasure::total_mass)
        .def("bin_masses", &LineMeasure::bin_masses)
        .def("__len__", &LineMeasure::size);

    m.def("cayley_measure", &cayley_measure);
    m.def("inverse_cayley_measure", &inverse_cayley_measure, py::arg("nu"),
          py::arg("one_floor") = 1e-9);
    m.def("moment_integral", &moment_integral);
    m.def("parfenov_sum", &parfenov_sum);
    m.def("arc_binned_sum", &arc_binned_sum);
    m.def("thm1_rescale", &thm1_rescale);

    py::class_<InnerFunctionModel>(m, "InnerFunctionModel")
        .def(py::init<CircleMeasure>())
        .def("theta", [](const InnerFunctionModel& f, cplx z) { return f.theta(z).value; })
        .def("theta_at_zero", &InnerFunctionModel::theta_at_zero)
        .def("theta_at_one", &InnerFunctionModel::theta_at_one)
        .def("herglotz", &InnerFunctionModel::herglotz)
        .def("g", &InnerFunctionModel::g);

    m.def("phi_t", &phi_t);
    m.def("psi_t", &psi_t);

    py::class_<PerturbedShiftModel>(m, "PerturbedShiftModel")
        .def(py::init<std::vector<CircleMeasure>, std::size_t, std::size_t>(),
             py::arg("blocks"), py::arg("max_blocks") = 32, py::arg("work_degree") = 256)
        .def("block_count", &PerturbedShiftModel::block_count)
        .def("total_rank", &PerturbedShiftModel::total_rank)
        .def("apply_stilde",
             [](const PerturbedShiftModel& mo, const std::vector<cplx>& f) {
                 return mo.apply_stilde(f);
             })
        .def("stilde_minus_s_norms",
             [](const PerturbedShiftModel& mo) { return diff_norms_dict(mo.stilde_minus_s_norms()); })
        .def("unitary_block_check",
             [](const PerturbedShiftModel& mo, double tol) {
                 return unitary_dict(mo.unitary_block_check(tol));
             },
             py::arg("tol") = 1e-8)
        .def("cogenerator_identity_check", &PerturbedShiftModel::cogenerator_identity_check);

    m.def("gram_K_spectrum",
          [](const LineMeasure& nu, double t) { return gram_K(nu, t).spectrum; });
    m.def("gram_K_trace",
          [](const LineMeasure& nu, double t) { return gram_K(nu, t).gram.trace().real(); });
    m.def("gram_Y_spectrum",
          [](const CircleMeasure& mu, double t) { return gram_Y(mu, t).spectrum; });
    m.def("gram_X_spectrum",
          [](const CircleMeasure& mu, double t) { return gram_X(mu, t).spectrum; });
    m.def("embedding_spectrum", &embedding_spectrum);
    m.def("phi_diff_spectrum", &phi_diff_spectrum);
    m.def("finite_section_spectrum", &finite_section_spectrum);
    m.def("hs_norm_sq_Y", py::overload_cast<const CircleMeasure&, double>(&hs_norm_sq_Y));
    m.def("hs_norm_sq_Y_line", py::overload_cast<const LineMeasure&, double>(&hs_norm_sq_Y));
    m.def("hs_norm_sq_K", &hs_norm_sq_K);
    m.def("schatten_norm", &schatten_norm);
    m.def("closed_form_gram_validated", &closed_form_gram_validated);
    m.def("bound_suite",
          [](const PerturbedShiftModel& mo, double t, double q) {
              return bound_list(bound_suite(mo, t, q));
          },
          py::arg("model"), py::arg("t"), py::arg("q") = 4.0);

    m.def("run_scenario", [](const std::string& config_json) {
        ScenarioConfig cfg = ScenarioConfig::from_json(nlohmann::json::parse(config_json));
        ScenarioReport rep = run_scenario(cfg);
        py::dict out;
        out["ok"] = rep.ok;
        out["report_json"] = rep.report_json;
        out["spectra_csv"] = rep.spectra_csv;
        out["bounds_csv"] = rep.bounds_csv;
        out["growth_csv"] = rep.growth_csv;
        return out;
    });
}
