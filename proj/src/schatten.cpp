#include "shiftpert/schatten.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "factored_svd.hpp"
#include "line_quadrature.hpp"

namespace shiftpert {

namespace {

// (e^{itz} - e^{itx})/(z - x) with the removable singularity at x = z
// evaluated by series; eitz = e^{itz} precomputed.
cplx diffq(double t, double zeta, cplx eitz, double x) {
    const double d = x - zeta;
    const double u = t * d;
    if (std::abs(u) < 1e-6) {
        cplx iu(0.0, u);
        return eitz * cplx(0.0, t) * (1.0 + 0.5 * iu + iu * iu / 6.0);
    }
    return eitz * (std::exp(cplx(0.0, u)) - 1.0) / d;
}

// Column pref * mult(x) * (e^{itz} - e^{itx})/(z - x) in split form.
detail::OscColumn osc_column(double t, double zeta, cplx pref,
                             std::function<cplx(double)> mult) {
    detail::OscColumn c;
    c.freq = t;
    const cplx eitz = std::exp(cplx(0.0, t * zeta));
    c.value = [t, zeta, pref, mult, eitz](double x) {
        return pref * mult(x) * diffq(t, zeta, eitz, x);
    };
    c.amp_dc = [zeta, pref, mult, eitz](double x) { return pref * mult(x) * eitz / (zeta - x); };
    c.amp_osc = [zeta, pref, mult](double x) { return -pref * mult(x) / (zeta - x); };
    return c;
}

// One-entry memo for the shared per-node factor of a column family; the
// quadrature loops evaluate every column at the same x consecutively.
struct SharedFactorCache {
    std::function<cplx(double)> eval;
    double x = std::numeric_limits<double>::quiet_NaN();
    cplx value;

    cplx get(double xx) {
        if (xx != x) {
            x = xx;
            value = eval(xx);
        }
        return value;
    }
};

std::function<cplx(double)> cached(std::function<cplx(double)> eval) {
    auto cache = std::make_shared<SharedFactorCache>();
    cache->eval = std::move(eval);
    return [cache](double x) { return cache->get(x); };
}

detail::LineMesh mesh_for(const LineMeasure& nu, double t) {
    detail::LineMesh mesh;
    mesh.max_freq = t;
    for (const auto& a : nu.atoms())
        mesh.features.emplace_back(a.point, std::min(1.0, a.mass / (2.0 * kPi)));
    return mesh;
}

void require_time(double t) {
    if (t < 0.0) throw std::invalid_argument("gram: t must be >= 0");
    // the analytic tail treatment needs omega * X >> 1
    if (t > 0.0 && t < 1e-3)
        throw std::invalid_argument("gram: quadrature path requires t = 0 or t >= 1e-3");
}

GramResult zero_gram(std::size_t n, SpectrumMethod method) {
    GramResult res;
    res.gram = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n),
                                      static_cast<Eigen::Index>(n));
    res.spectrum.values.assign(n, 0.0);
    res.spectrum.method = method;
    return res;
}

std::vector<detail::OscColumn> k_columns(const LineMeasure& nu, double t,
                                         const std::function<cplx(double)>& mult) {
    std::vector<detail::OscColumn> cols;
    cols.reserve(nu.size());
    for (const auto& a : nu.atoms()) {
        cplx pref = std::sqrt(a.mass) * cplx(0.0, -0.5 / kPi);  // sqrt(m)/(2 pi i)
        cols.push_back(osc_column(t, a.point, pref, mult));
    }
    return cols;
}

Eigen::MatrixXcd closed_form_K_gram(const LineMeasure& nu, double t) {
    const auto n = static_cast<Eigen::Index>(nu.size());
    Eigen::MatrixXcd g(n, n);
    const auto& atoms = nu.atoms();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            // <c_k, c_j> = sqrt(m_j m_k) (e^{it d} - 1)/(2 pi i d), d = z_k - z_j
            double d = atoms[static_cast<std::size_t>(k)].point -
                       atoms[static_cast<std::size_t>(j)].point;
            double u = t * d;
            cplx kernel;
            if (std::abs(u) < 1e-8) {
                kernel = t / (2.0 * kPi) * (1.0 + cplx(0.0, 0.5 * u));
            } else {
                kernel = (std::exp(cplx(0.0, u)) - 1.0) / (cplx(0.0, 2.0 * kPi) * d);
            }
            g(j, k) = std::sqrt(atoms[static_cast<std::size_t>(j)].mass *
                                atoms[static_cast<std::size_t>(k)].mass) *
                      kernel;
        }
    return g;
}

GramResult gram_Y_line(const LineMeasure& nu, double t) {
    require_time(t);
    if (t == 0.0 || nu.empty()) return zero_gram(nu.size(), SpectrumMethod::QuadratureGram);
    auto nu_ptr = std::make_shared<LineMeasure>(nu);
    auto one_minus_theta = cached([nu_ptr](double x) {
        return cplx(1.0, 0.0) - theta_halfplane_from_line(*nu_ptr, cplx(x, 0.0));
    });
    auto cols = k_columns(nu, t, one_minus_theta);
    detail::LineGramResult lg = detail::line_gram(cols, mesh_for(nu, t));
    GramResult res;
    res.gram = lg.gram;
    res.spectrum = spectrum_from_gram(lg.gram, SpectrumMethod::QuadratureGram, lg.est_error);
    return res;
}

double hs_norm_sq_Y_line(const LineMeasure& nu, double t) {
    require_time(t);
    if (t == 0.0 || nu.empty()) return 0.0;
    auto nu_ptr = std::make_shared<LineMeasure>(nu);
    auto one_minus_theta = cached([nu_ptr](double x) {
        return cplx(1.0, 0.0) - theta_halfplane_from_line(*nu_ptr, cplx(x, 0.0));
    });
    auto cols = k_columns(nu, t, one_minus_theta);
    return detail::line_gram_trace(cols, mesh_for(nu, t));
}

}  // namespace

SingularSpectrum spectrum_from_gram(const Eigen::MatrixXcd& gram, SpectrumMethod method,
                                    double error_estimate) {
    SingularSpectrum s;
    s.method = method;
    s.error_estimate = error_estimate;
    if (gram.rows() == 0) return s;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
    const double trace = gram.trace().real();
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(trace, 1e-300))
        throw std::runtime_error("spectrum_from_gram: matrix is not positive semidefinite");
    for (Eigen::Index i = es.eigenvalues().size(); i-- > 0;) {
        double ev = es.eigenvalues()(i);
        if (ev < 1e-12 * trace) ev = 0.0;
        s.values.push_back(std::sqrt(ev));
    }
    std::sort(s.values.begin(), s.values.end(), std::greater<>());
    return s;
}

GramResult gram_K_quadrature(const LineMeasure& nu, double t) {
    require_time(t);
    if (t == 0.0 || nu.empty()) return zero_gram(nu.size(), SpectrumMethod::QuadratureGram);
    auto cols = k_columns(nu, t, [](double) { return cplx(1.0, 0.0); });
    detail::LineGramResult lg = detail::line_gram(cols, mesh_for(nu, t));
    GramResult res;
    res.gram = lg.gram;
    res.spectrum = spectrum_from_gram(lg.gram, SpectrumMethod::QuadratureGram, lg.est_error);
    return res;
}

double hs_norm_sq_K(const LineMeasure& nu, double t) {
    require_time(t);
    if (t == 0.0 || nu.empty()) return 0.0;
    auto cols = k_columns(nu, t, [](double) { return cplx(1.0, 0.0); });
    return detail::line_gram_trace(cols, mesh_for(nu, t));
}

bool closed_form_gram_validated() {
    static const bool ok = [] {
        Rng rng(0x5eed5eedULL);
        for (int c = 0; c < 20; ++c) {
            int n = rng.uniform_int(1, 4);
            std::vector<LineAtom> atoms;
            for (int i = 0; i < n; ++i) {
                double p = 0.0;
                for (int tries = 0; tries < 100; ++tries) {
                    p = rng.uniform(-5.0, 5.0);
                    bool clear = true;
                    for (const auto& a : atoms)
                        if (std::abs(a.point - p) < 0.2) clear = false;
                    if (clear) break;
                }
                atoms.push_back({p, rng.uniform(0.1, 2.0)});
            }
            LineMeasure nu(atoms);
            double t = rng.uniform(0.3, 2.0);
            Eigen::MatrixXcd closed = closed_form_K_gram(nu, t);
            Eigen::MatrixXcd quad = gram_K_quadrature(nu, t).gram;
            double scale = std::max(1.0, closed.trace().real());
            if ((closed - quad).cwiseAbs().maxCoeff() > 1e-6 * scale) return false;
        }
        return true;
    }();
    return ok;
}

GramResult gram_K(const LineMeasure& nu, double t) {
    if (t < 0.0) throw std::invalid_argument("gram_K: t must be >= 0");
    if (!closed_form_gram_validated()) return gram_K_quadrature(nu, t);
    GramResult res;
    res.gram = closed_form_K_gram(nu, t);
    res.spectrum = spectrum_from_gram(res.gram, SpectrumMethod::ClosedFormGram, 0.0);
    return res;
}

GramResult gram_Y(const CircleMeasure& mu, double t) { return gram_Y_line(cayley_measure(mu), t); }

GramResult gram_Y(const LineMeasure& nu, double t) { return gram_Y_line(nu, t); }

double hs_norm_sq_Y(const CircleMeasure& mu, double t) {
    return hs_norm_sq_Y_line(cayley_measure(mu), t);
}

double hs_norm_sq_Y(const LineMeasure& nu, double t) { return hs_norm_sq_Y_line(nu, t); }

GramResult gram_X(const CircleMeasure& mu, double t) {
    require_time(t);
    if (t == 0.0 || mu.empty()) return zero_gram(mu.size(), SpectrumMethod::QuadratureGram);
    auto model = std::make_shared<InnerFunctionModel>(mu);
    // z(x) = (x-i)/(x+i); the H^2 boundary measure becomes dx/(pi(1+x^2))
    auto shared_factor = cached([model](double x) {
        cplx z = (cplx(x, -1.0)) / (cplx(x, 1.0));
        return (cplx(1.0, 0.0) - model->theta(z).value) * cplx(x, 1.0) /
               std::sqrt(1.0 + x * x);
    });
    LineMeasure nu = cayley_measure(mu);
    std::vector<detail::OscColumn> cols;
    const auto& catoms = mu.atoms();
    const auto& latoms = nu.atoms();
    for (std::size_t k = 0; k < catoms.size(); ++k) {
        double zeta = latoms[k].point;
        // sqrt(w) xi (zeta + i) / (2 i sqrt(pi))
        cplx pref = std::sqrt(catoms[k].weight) * catoms[k].point * cplx(zeta, 1.0) /
                    (cplx(0.0, 2.0) * std::sqrt(kPi));
        cols.push_back(osc_column(t, zeta, pref, shared_factor));
    }
    detail::LineGramResult lg = detail::line_gram(cols, mesh_for(nu, t));
    GramResult res;
    res.gram = lg.gram;
    res.spectrum = spectrum_from_gram(lg.gram, SpectrumMethod::QuadratureGram, lg.est_error);
    return res;
}

SingularSpectrum embedding_spectrum(const LineMeasure& nu, double t) {
    return gram_K(nu, t).spectrum;
}

SingularSpectrum phi_diff_spectrum(const PerturbedShiftModel& model, double t) {
    require_time(t);
    SingularSpectrum s;
    s.method = SpectrumMethod::QuadratureGram;
    if (t == 0.0 || model.total_rank() == 0) {
        s.values.assign(model.total_rank(), 0.0);
        return s;
    }

    // W_i(x) = (phi_t(xi_i) - e^{itx}) B_i(z(x)) / sqrt(pi (1 + x^2))
    std::vector<detail::OscColumn> wcols;
    detail::LineMesh mesh;
    mesh.max_freq = t;
    for (std::size_t i = 0; i < model.total_rank(); ++i) {
        const auto& atom = model.atoms()[i];
        cplx zc = cplx(0.0, 1.0) * (1.0 + atom.xi) / (1.0 - atom.xi);
        double zeta = zc.real();
        double mass = kPi * (1.0 + zeta * zeta) * atom.weight;
        mesh.features.emplace_back(zeta, std::min(1.0, mass / (2.0 * kPi)));

        auto btilde = [&model, i](double x) {
            cplx z = cplx(x, -1.0) / cplx(x, 1.0);
            return model.basis(i, z) / std::sqrt(kPi * (1.0 + x * x));
        };
        cplx phi_at_atom = phi_t(t, atom.xi);
        detail::OscColumn c;
        c.freq = t;
        c.value = [phi_at_atom, t, btilde](double x) {
            return (phi_at_atom - std::exp(cplx(0.0, t * x))) * btilde(x);
        };
        c.amp_dc = [phi_at_atom, btilde](double x) { return phi_at_atom * btilde(x); };
        c.amp_osc = [btilde](double x) { return -btilde(x); };
        wcols.push_back(std::move(c));
    }
    detail::LineGramResult gw = detail::line_gram(wcols, mesh);

    std::vector<std::function<cplx(cplx)>> basis_fns;
    for (std::size_t i = 0; i < model.total_rank(); ++i)
        basis_fns.push_back([&model, i](cplx z) { return model.basis(i, z); });
    CircleQuadratureOptions opts;
    opts.initial_grid = 512;
    opts.max_grid = (1u << 21);
    opts.tolerance = 1e-11;
    Eigen::MatrixXcd gu = circle_gram(basis_fns, opts);

    s.values = detail::factored_singular_values(gw.gram, gu);
    s.error_estimate = gw.est_error;
    const double top = s.values.empty() ? 0.0 : s.values.front();
    for (double& v : s.values)
        if (v < 1e-12 * top) v = 0.0;
    return s;
}

SingularSpectrum finite_section_spectrum(const PerturbedShiftModel& model, double t,
                                         std::size_t M) {
    TruncatedOperator full = matrix_truncation(model, OperatorKind::PhiPerturbedShift, t, M);
    TruncatedOperator base = matrix_truncation(model, OperatorKind::PhiShift, t, M);
    Eigen::MatrixXcd diff = full.matrix - base.matrix;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(diff);
    SingularSpectrum s;
    s.method = SpectrumMethod::FiniteSection;
    s.error_estimate = full.tail_mass;
    const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        double v = svd.singularValues()(i);
        if (v < 1e-13 * top) break;
        s.values.push_back(v);
    }
    if (s.values.empty()) s.values.push_back(0.0);
    return s;
}

double schatten_norm(const SingularSpectrum& spectrum, double p) {
    if (std::isinf(p)) return spectrum.values.empty() ? 0.0 : spectrum.values.front();
    if (!(p > 0.0)) throw std::invalid_argument("schatten_norm: p must be positive");
    CompensatedSum s;
    for (double v : spectrum.values)
        if (v > 0.0) s.add(std::pow(v, p));
    return std::pow(s.value(), 1.0 / p);
}

std::vector<BoundCheck> bound_suite(const PerturbedShiftModel& model, double t, double q) {
    std::vector<BoundCheck> checks;
    if (model.block_count() == 0) return checks;
    const bool single = model.block_count() == 1;
    auto suffix = [&](std::size_t n) { return single ? std::string() : "_b" + std::to_string(n); };
    // slack for <=-bounds evaluated through quadrature
    auto le = [](double lhs, double rhs) { return lhs <= rhs * (1.0 + 1e-9) + 1e-14; };

    DiffNorms dn = model.stilde_minus_s_norms();
    if (single)
        checks.push_back({"eq47", dn.op_norm, dn.bound_47, dn.op_norm < dn.bound_47, true, 0.0});
    checks.push_back(
        {"eq212", dn.s1_norm, dn.bound_212, dn.s1_norm < dn.bound_212, true, 0.0});

    SingularSpectrum phi_spec = phi_diff_spectrum(model, t);
    double s2 = schatten_norm(phi_spec, 2.0);
    double s1 = schatten_norm(phi_spec, 1.0);

    CompensatedSum moment2_sqrt, momentq_sqrt;
    for (std::size_t n = 0; n < model.block_count(); ++n) {
        moment2_sqrt.add(std::sqrt(moment_integral(model.block(n).measure(), 2.0)));
        momentq_sqrt.add(std::sqrt(moment_integral(model.block(n).measure(), q)));
    }
    double rhs99 = 2.0 * std::sqrt(2.0 * t) * moment2_sqrt.value();
    checks.push_back({"eq99", s2, rhs99, le(s2, rhs99), true, 0.0});

    double shape81 = std::sqrt(t) * momentq_sqrt.value();
    checks.push_back({single ? "eq996" : "eq81", s1, shape81, true, false,
                      shape81 > 0.0 ? s1 / shape81 : 0.0});

    for (std::size_t n = 0; n < model.block_count(); ++n) {
        const CircleMeasure& mu = model.block(n).measure();
        LineMeasure nu = cayley_measure(mu);
        GramResult gy = gram_Y(mu, t);
        GramResult gk = gram_K(nu, t);
        const double ps[] = {1.0, 1.5, 2.0, std::numeric_limits<double>::infinity()};
        const char* tags[] = {"eq444_p1", "eq444_p1.5", "eq444_p2", "eq444_pinf"};
        for (int i = 0; i < 4; ++i) {
            double lhs = schatten_norm(gy.spectrum, ps[i]);
            double rhs = 2.0 * schatten_norm(gk.spectrum, ps[i]);
            checks.push_back({tags[i] + suffix(n), lhs, rhs, le(lhs, rhs), true, 0.0});
        }
        double e1 = schatten_norm(gk.spectrum, 1.0);
        double shape = std::sqrt(0.5 * t) * parfenov_sum(nu, 1.0);
        checks.push_back({"criter1_p1" + suffix(n), e1, shape, true, false,
                          shape > 0.0 ? e1 / shape : 0.0});
    }
    return checks;
}

}  // namespace shiftpert
