#include "gv/curvature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace gv {

namespace {

struct MetricJets {
    Eigen::MatrixXd g;
    Tensor3 dg;    // dg(i,j,m) = d_m g_ij
    Tensor4 ddg;   // ddg(i,j,m,l) = d_m d_l g_ij
    Eigen::MatrixXd ginv;
    double cond = 0.0;
};

MetricJets eval_metric(const MetricChart& metric, std::span<const double> point) {
    const int d = metric.dim;
    if (static_cast<int>(point.size()) != d)
        throw InvalidInput("metric evaluation: point dimension mismatch");
    if (!metric.valid(point)) throw DomainError("point outside chart domain", 0.0);
    auto jets = Jet2::seed(point);
    JetMat G = metric.eval(jets);

    MetricJets out;
    out.g.resize(d, d);
    out.dg = Tensor3(d);
    out.ddg = Tensor4(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const Jet2& e = G(i, j);
            out.g(i, j) = e.value();
            for (int m = 0; m < d; ++m) {
                out.dg(i, j, m) = e.grad(m);
                for (int l = 0; l < d; ++l) out.ddg(i, j, m, l) = e.hess(m, l);
            }
        }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(out.g);
    if (!lu.isInvertible()) throw LinearSolveError("singular metric", 1e300);
    out.ginv = lu.inverse();
    out.cond = condition_estimate(out.g);
    return out;
}

Tensor3 christoffel_from(const MetricJets& m, int d) {
    Tensor3 Gam(d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                double s = 0.0;
                for (int l = 0; l < d; ++l)
                    s += m.ginv(k, l) * (m.dg(j, l, i) + m.dg(i, l, j) - m.dg(i, j, l));
                Gam(k, i, j) = Gam(k, j, i) = 0.5 * s;
            }
    return Gam;
}

}  // namespace

Tensor3 christoffel(const MetricChart& metric, std::span<const double> point) {
    MetricJets m = eval_metric(metric, point);
    return christoffel_from(m, metric.dim);
}

CurvatureReport curvature_tensors(const MetricChart& metric, std::span<const double> point) {
    const int d = metric.dim;
    MetricJets m = eval_metric(metric, point);
    Tensor3 Gam = christoffel_from(m, d);

    // d_m g^{kl} = -g^{ka} (d_m g_ab) g^{bl}
    Tensor3 dginv(d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
            for (int mm = 0; mm < d; ++mm) {
                double s = 0.0;
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        s -= m.ginv(k, a) * m.dg(a, b, mm) * m.ginv(b, l);
                dginv(k, l, mm) = s;
            }

    // d_m Gamma^k_{ij}, assembled from g, dg, ddg (no third derivative needed)
    Tensor4 dGam(d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j)
                for (int mm = 0; mm < d; ++mm) {
                    double s = 0.0;
                    for (int l = 0; l < d; ++l) {
                        s += dginv(k, l, mm) * (m.dg(j, l, i) + m.dg(i, l, j) - m.dg(i, j, l));
                        s += m.ginv(k, l) *
                             (m.ddg(j, l, i, mm) + m.ddg(i, l, j, mm) - m.ddg(i, j, l, mm));
                    }
                    dGam(k, i, j, mm) = dGam(k, j, i, mm) = 0.5 * s;
                }

    CurvatureReport rep;
    rep.point = Eigen::Map<const Eigen::VectorXd>(point.data(), static_cast<long>(point.size()));
    rep.metric = m.g;
    rep.christoffel = Gam;
    rep.metric_condition = m.cond;
    rep.ill_conditioned = m.cond > 1e8;

    // R^l_{ijk} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
    //           + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik}
    Tensor4 R(d);
    for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    double s = dGam(l, j, k, i) - dGam(l, i, k, j);
                    for (int mm = 0; mm < d; ++mm)
                        s += Gam(l, i, mm) * Gam(mm, j, k) - Gam(l, j, mm) * Gam(mm, i, k);
                    R(l, i, j, k) = s;
                }
    rep.riemann = R;

    rep.ricci.resize(d, d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += R(i, i, j, k);
            rep.ricci(j, k) = s;
        }
    rep.ricci_symmetry_residual = (rep.ricci - rep.ricci.transpose()).cwiseAbs().maxCoeff();
    rep.scalar = (m.ginv * rep.ricci).trace();
    return rep;
}

double ricci_operator_norm(const MetricChart& metric, std::span<const double> point) {
    CurvatureReport rep = curvature_tensors(metric, point);
    Eigen::MatrixXd sym = 0.5 * (rep.ricci + rep.ricci.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, rep.metric);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

SweepSummary ricci_residual_sweep(const MetricChart& metric, const PointSampler& sampler,
                                  int count, std::mt19937_64& rng) {
    if (count < 1) throw InvalidInput("ricci_residual_sweep: count must be >= 1");
    SweepSummary s;
    double sum = 0.0;
    for (int i = 0; i < count; ++i) {
        Eigen::VectorXd p = sampler(rng);
        try {
            std::span<const double> ps(p.data(), static_cast<size_t>(p.size()));
            double r = ricci_operator_norm(metric, ps);
            s.max_residual = std::max(s.max_residual, r);
            sum += r;
            ++s.count;
        } catch (const Error&) {
            ++s.failures;
        }
    }
    if (s.count > 0) s.mean_residual = sum / s.count;
    return s;
}

MetricChart euclidean_chart(int n) {
    MetricChart c;
    c.dim = n;
    c.eval = [n](std::span<const Jet2> x) { return JetMat::identity(n, x[0].dim()); };
    return c;
}

MetricChart sphere_chart(int n) {
    MetricChart c;
    c.dim = n;
    c.eval = [n](std::span<const Jet2> x) {
        Jet2 r2 = Jet2::constant(x[0].dim(), 0.0);
        for (int i = 0; i < n; ++i) r2 += x[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
        Jet2 f = inv((1.0 + r2) * (1.0 + r2)) * 4.0;
        JetMat g = JetMat::zero(n, n, x[0].dim());
        for (int i = 0; i < n; ++i) g(i, i) = f;
        return g;
    };
    return c;
}

MetricChart polar_sphere_chart() {
    MetricChart c;
    c.dim = 2;
    c.eval = [](std::span<const Jet2> x) {
        JetMat g = JetMat::zero(2, 2, x[0].dim());
        g(0, 0) = Jet2::constant(x[0].dim(), 1.0);
        Jet2 s = sin(x[0]);
        g(1, 1) = s * s;
        return g;
    };
    c.valid = [](std::span<const double> p) { return p[0] > 0.05 && p[0] < M_PI - 0.05; };
    return c;
}

}  // namespace gv
