#include "line_quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace shiftpert::detail {

double LineMesh::effective_half_width() const {
    double x = half_width;
    for (const auto& [pos, scale] : features)
        x = std::max(x, std::abs(pos) + 100.0);
    // keep the integration-by-parts tail remainder ~ 1/(omega^3 X^4) small
    // even for slow oscillation
    x = std::max(x, 20.0 / std::max(max_freq, 1e-3));
    return x;
}

std::vector<double> LineMesh::build_edges() const {
    const double x_max = effective_half_width();
    const double w = std::min(1.0, kPi / (2.0 * std::max(max_freq, 0.5)));
    std::vector<double> edges;
    const auto n_uniform = static_cast<std::size_t>(std::ceil(2.0 * x_max / w));
    edges.reserve(n_uniform + 32 * features.size() + 2);
    for (std::size_t i = 0; i <= n_uniform; ++i)
        edges.push_back(-x_max + 2.0 * x_max * static_cast<double>(i) / static_cast<double>(n_uniform));
    for (const auto& [pos, scale] : features) {
        if (std::abs(pos) >= x_max) continue;
        double s = std::clamp(scale, 1e-9, w);
        edges.push_back(pos);
        for (double d = s; d < w; d *= 2.0) {
            if (pos + d < x_max) edges.push_back(pos + d);
            if (pos - d > -x_max) edges.push_back(pos - d);
        }
    }
    std::sort(edges.begin(), edges.end());
    // drop near-duplicate edges so panels keep a sane aspect ratio
    std::vector<double> out;
    out.reserve(edges.size());
    out.push_back(edges.front());
    for (double e : edges)
        if (e - out.back() > 1e-12 * std::max(1.0, std::abs(e))) out.push_back(e);
    if (out.back() < x_max) out.push_back(x_max);
    return out;
}

namespace {

// 8-point Gauss-Legendre, used as the embedded error estimate.
const double kGl8Nodes[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
const double kGl8Weights[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

// derivative stencils (4th order central)
cplx fd1(const std::function<cplx(double)>& f, double x, double h) {
    return (f(x - 2 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2 * h)) / (12.0 * h);
}
cplx fd2(const std::function<cplx(double)>& f, double x, double h) {
    return (-f(x - 2 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2 * h)) /
           (12.0 * h * h);
}

}  // namespace

cplx oscillatory_tail(const std::function<cplx(double)>& g, double omega,
                      double cutoff, int ray) {
    if (ray < 0) {
        // reflect: int_{-inf}^{-a} g(x) e^{i w x} dx = int_a^inf g(-y) e^{-i w y} dy
        auto gr = [&g](double y) { return g(-y); };
        return oscillatory_tail(gr, -omega, cutoff, +1);
    }
    // int_a^inf g e^{iwx} dx = e^{iwa} [ -g/(iw) + g'/(iw)^2 - g''/(iw)^3 ](a) + O(g'''/w^3)
    const double a = cutoff;
    const double h = 0.25;
    const cplx iw(0.0, omega);
    cplx g0 = g(a), g1 = fd1(g, a, h), g2 = fd2(g, a, h);
    cplx phase = std::exp(cplx(0.0, omega * a));
    return phase * (-g0 / iw + g1 / (iw * iw) - g2 / (iw * iw * iw));
}

cplx algebraic_tail(const std::function<cplx(double)>& g, double cutoff, int ray) {
    // substitute x = ray/u: int over the ray = int_0^{1/cutoff} g(ray/u)/u^2 du
    const double b = 1.0 / cutoff;
    const int panels = 8;
    CompensatedComplexSum acc;
    for (int p = 0; p < panels; ++p) {
        double lo = b * p / panels, hi = b * (p + 1) / panels;
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int q = 0; q < 16; ++q) {
            double u = mid + half * GaussLegendre16::nodes[q];
            double x = static_cast<double>(ray) / u;
            acc.add(GaussLegendre16::weights[q] * half * g(x) / (u * u));
        }
    }
    return acc.value();
}

namespace {

struct TailParts {
    // tail of entry (j,k): dc + e^{+i f x} and e^{-i f x} components
    cplx total;
};

cplx entry_tails(const OscColumn& ck, const OscColumn& cj, double x_max) {
    auto g_dc = [&](double x) {
        return ck.amp_dc(x) * std::conj(cj.amp_dc(x)) + ck.amp_osc(x) * std::conj(cj.amp_osc(x));
    };
    auto g_plus = [&](double x) { return ck.amp_osc(x) * std::conj(cj.amp_dc(x)); };
    auto g_minus = [&](double x) { return ck.amp_dc(x) * std::conj(cj.amp_osc(x)); };
    const double f = ck.freq;
    cplx total = 0.0;
    for (int ray : {+1, -1}) {
        total += algebraic_tail(g_dc, x_max, ray);
        total += oscillatory_tail(g_plus, f, x_max, ray);
        total += oscillatory_tail(g_minus, -f, x_max, ray);
    }
    return total;
}

}  // namespace

LineGramResult line_gram(const std::vector<OscColumn>& cols, const LineMesh& mesh) {
    const auto n = static_cast<Eigen::Index>(cols.size());
    LineGramResult res;
    res.gram = Eigen::MatrixXcd::Zero(n, n);
    if (n == 0) return res;

    const std::vector<double> edges = mesh.build_edges();
    const double x_max = edges.back();
    const std::size_t panels = edges.size() - 1;

    Eigen::MatrixXcd acc16 = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd acc8 = Eigen::MatrixXcd::Zero(n, n);
    std::vector<cplx> vals(static_cast<std::size_t>(n));
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = 0.5 * (edges[p] + edges[p + 1]);
        const double half = 0.5 * (edges[p + 1] - edges[p]);
        for (int q = 0; q < 16; ++q) {
            const double x = mid + half * GaussLegendre16::nodes[q];
            const double wq = half * GaussLegendre16::weights[q];
            for (Eigen::Index k = 0; k < n; ++k) vals[static_cast<std::size_t>(k)] = cols[static_cast<std::size_t>(k)].value(x);
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index k = j; k < n; ++k)
                    acc16(j, k) += wq * vals[static_cast<std::size_t>(k)] * std::conj(vals[static_cast<std::size_t>(j)]);
        }
        for (int q = 0; q < 8; ++q) {
            const double x = mid + half * kGl8Nodes[q];
            const double wq = half * kGl8Weights[q];
            for (Eigen::Index k = 0; k < n; ++k) vals[static_cast<std::size_t>(k)] = cols[static_cast<std::size_t>(k)].value(x);
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index k = j; k < n; ++k)
                    acc8(j, k) += wq * vals[static_cast<std::size_t>(k)] * std::conj(vals[static_cast<std::size_t>(j)]);
        }
    }
    res.est_error = (acc16 - acc8).cwiseAbs().maxCoeff();

    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = j; k < n; ++k)
            acc16(j, k) += entry_tails(cols[static_cast<std::size_t>(k)], cols[static_cast<std::size_t>(j)], x_max);

    // fill the lower triangle; the Gram is Hermitian by construction
    for (Eigen::Index j = 0; j < n; ++j) {
        res.gram(j, j) = acc16(j, j).real();
        for (Eigen::Index k = j + 1; k < n; ++k) {
            res.gram(j, k) = acc16(j, k);
            res.gram(k, j) = std::conj(acc16(j, k));
        }
    }
    return res;
}

double line_gram_trace(const std::vector<OscColumn>& cols, const LineMesh& mesh) {
    if (cols.empty()) return 0.0;
    const std::vector<double> edges = mesh.build_edges();
    const double x_max = edges.back();
    CompensatedSum acc;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double mid = 0.5 * (edges[p] + edges[p + 1]);
        const double half = 0.5 * (edges[p + 1] - edges[p]);
        for (int q = 0; q < 16; ++q) {
            const double x = mid + half * GaussLegendre16::nodes[q];
            double density = 0.0;
            for (const auto& c : cols) density += std::norm(c.value(x));
            acc.add(half * GaussLegendre16::weights[q] * density);
        }
    }
    for (const auto& c : cols) {
        cplx t = entry_tails(c, c, x_max);
        acc.add(t.real());
    }
    return acc.value();
}

}  // namespace shiftpert::detail
