#include <doctest.h>

#include <cmath>
#include <random>

#include "gv/curvature.hpp"
#include "gv/rng.hpp"

using namespace gv;

namespace {

// Finite-difference curvature oracle: plain-double metric evaluations and
// central stencils all the way, no jets. Used to certify the jet path.
class FdCurvature {
public:
    FdCurvature(const MetricChart& m, double h) : m_(m), h_(h) {}

    Eigen::MatrixXd metric(const Eigen::VectorXd& p) const {
        std::vector<double> q(p.data(), p.data() + p.size());
        auto jets = Jet2::seed(q);
        return m_.eval(jets).values();
    }

    Tensor3 christoffel(const Eigen::VectorXd& p) const {
        int d = m_.dim;
        Tensor3 G(d);
        Eigen::MatrixXd ginv = metric(p).inverse();
        std::vector<Eigen::MatrixXd> dg;
        for (int m = 0; m < d; ++m) {
            Eigen::VectorXd pp = p, pm = p;
            pp[m] += h_;
            pm[m] -= h_;
            dg.push_back((metric(pp) - metric(pm)) / (2 * h_));
        }
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double s = 0;
                    for (int l = 0; l < d; ++l)
                        s += ginv(k, l) *
                             (dg[static_cast<size_t>(i)](j, l) + dg[static_cast<size_t>(j)](i, l) -
                              dg[static_cast<size_t>(l)](i, j));
                    G(k, i, j) = 0.5 * s;
                }
        return G;
    }

    Eigen::MatrixXd ricci(const Eigen::VectorXd& p) const {
        int d = m_.dim;
        Tensor3 G0 = christoffel(p);
        std::vector<Tensor3> dG;
        for (int m = 0; m < d; ++m) {
            Eigen::VectorXd pp = p, pm = p;
            pp[m] += h_;
            pm[m] -= h_;
            Tensor3 a = christoffel(pp), b = christoffel(pm), r(d);
            for (size_t t = 0; t < r.a.size(); ++t) r.a[t] = (a.a[t] - b.a[t]) / (2 * h_);
            dG.push_back(r);
        }
        Eigen::MatrixXd ric(d, d);
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double s = 0;
                for (int i = 0; i < d; ++i) {
                    s += dG[static_cast<size_t>(i)](i, j, k) - dG[static_cast<size_t>(j)](i, i, k);
                    for (int m = 0; m < d; ++m)
                        s += G0(i, i, m) * G0(m, j, k) - G0(i, j, m) * G0(m, i, k);
                }
                ric(j, k) = s;
            }
        return ric;
    }

private:
    const MetricChart& m_;
    double h_;
};

MetricChart random_analytic_chart(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> gauss;
    std::vector<Eigen::MatrixXd> amp(static_cast<size_t>(d), Eigen::MatrixXd(d, d));
    Eigen::MatrixXd freq(d, d);
    for (int k = 0; k < d; ++k) {
        for (int i = 0; i < d; ++i) {
            freq(k, i) = 0.5 * gauss(rng);
            for (int j = 0; j < d; ++j) amp[static_cast<size_t>(k)](i, j) = 0.08 * gauss(rng);
        }
    }
    MetricChart c;
    c.dim = d;
    c.eval = [d, amp, freq](std::span<const Jet2> x) {
        JetMat g = JetMat::identity(d, x[0].dim());
        for (int k = 0; k < d; ++k) {
            Jet2 phase = Jet2::constant(x[0].dim(), 0.3);
            for (int i = 0; i < d; ++i) phase += freq(k, i) * x[static_cast<size_t>(i)];
            Jet2 s = sin(phase);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double a = 0.5 * (amp[static_cast<size_t>(k)](i, j) +
                                      amp[static_cast<size_t>(k)](j, i));
                    g(i, j) += a * s;
                }
        }
        return g;
    };
    return c;
}

}  // namespace

TEST_CASE("Euclidean metric has vanishing Christoffel symbols") {
    auto c = euclidean_chart(4);
    std::vector<double> p = {0.1, 0.2, -0.3, 0.4};
    auto G = christoffel(c, p);
    for (double v : G.a) CHECK(v == 0.0);
}

TEST_CASE("polar S^2: Gamma^theta_{phi phi} = -sin(theta) cos(theta)") {
    // hand oracle: for g = dtheta^2 + sin^2(theta) dphi^2,
    //   Gamma^0_{11} = -sin cos, Gamma^1_{01} = cot(theta)
    auto c = polar_sphere_chart();
    std::vector<double> p = {0.9, 1.3};
    auto G = christoffel(c, p);
    CHECK(G(0, 1, 1) == doctest::Approx(-std::sin(0.9) * std::cos(0.9)).epsilon(1e-12));
    CHECK(G(1, 0, 1) == doctest::Approx(std::cos(0.9) / std::sin(0.9)).epsilon(1e-12));
}

TEST_CASE("Christoffel symmetry in the lower pair") {
    std::mt19937_64 rng(31);
    auto chart = random_analytic_chart(rng, 4);
    std::vector<double> p = {0.2, -0.4, 0.5, 0.1};
    auto G = christoffel(chart, p);
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(G(k, i, j) == G(k, j, i));
}

TEST_CASE("flat space curvature vanishes") {
    auto c = euclidean_chart(5);
    std::vector<double> p = {1.0, -2.0, 0.5, 0.0, 3.0};
    auto rep = curvature_tensors(c, p);
    CHECK(rep.ricci.cwiseAbs().maxCoeff() == 0.0);
    CHECK(rep.scalar == 0.0);
}

TEST_CASE("round S^n is Einstein with constant n-1") {
    std::mt19937_64 rng(77);
    for (int n : {2, 4, 7}) {
        auto c = sphere_chart(n);
        for (int t = 0; t < 3; ++t) {
            Eigen::VectorXd p = 0.4 * random_unit_vector(rng, n);
            auto rep = curvature_tensors(
                c, std::span<const double>(p.data(), static_cast<size_t>(n)));
            Eigen::MatrixXd diff = rep.ricci - (n - 1.0) * rep.metric;
            CHECK(diff.cwiseAbs().maxCoeff() < 1e-8);
            CHECK(rep.scalar == doctest::Approx(n * (n - 1.0)).epsilon(1e-8));
        }
    }
}

TEST_CASE("round sphere Ricci vs finite-difference oracle") {
    auto c = sphere_chart(3);
    FdCurvature fd(c, 1e-4);
    std::mt19937_64 rng(123);
    for (int t = 0; t < 3; ++t) {
        Eigen::VectorXd p = 0.3 * random_unit_vector(rng, 3);
        auto rep = curvature_tensors(c, std::span<const double>(p.data(), 3));
        Eigen::MatrixXd oracle = fd.ricci(p);
        CHECK((rep.ricci - oracle).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("product of Ricci-flat factors is Ricci-flat") {
    // flat T^2-style block plus flat R^3 block with a curvilinear chart
    MetricChart c;
    c.dim = 5;
    c.eval = [](std::span<const Jet2> x) {
        JetMat g = JetMat::zero(5, 5, x[0].dim());
        // flat 2d block in "polar-like" coordinates (r, phi): dr^2 + r^2 dphi^2
        g(0, 0) = Jet2::constant(x[0].dim(), 1.0);
        g(1, 1) = x[0] * x[0];
        for (int i = 2; i < 5; ++i) g(i, i) = Jet2::constant(x[0].dim(), 1.0);
        return g;
    };
    std::vector<double> p = {1.3, 0.4, 0.0, 1.0, -1.0};
    auto rep = curvature_tensors(c, p);
    CHECK(rep.ricci.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("first Bianchi identity on random analytic metrics") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 3; ++trial) {
        auto chart = random_analytic_chart(rng, 4);
        std::vector<double> p = {0.1, 0.7, -0.2, 0.3};
        auto rep = curvature_tensors(chart, p);
        double worst = 0.0;
        for (int l = 0; l < 4; ++l)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    for (int k = 0; k < 4; ++k)
                        worst = std::max(worst,
                                         std::abs(rep.riemann(l, i, j, k) + rep.riemann(l, j, k, i) +
                                                  rep.riemann(l, k, i, j)));
        CHECK(worst < 1e-9);
        CHECK(rep.ricci_symmetry_residual < 1e-10);
        // antisymmetry in the derivative index pair
        double anti = 0.0;
        for (int l = 0; l < 4; ++l)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    for (int k = 0; k < 4; ++k)
                        anti = std::max(
                            anti, std::abs(rep.riemann(l, i, j, k) + rep.riemann(l, j, i, k)));
        CHECK(anti < 1e-10);
    }
}

TEST_CASE("scalar curvature is invariant under affine chart change") {
    std::mt19937_64 rng(44);
    auto chart = random_analytic_chart(rng, 3);
    // affine change x = A y + b
    Eigen::MatrixXd A(3, 3);
    A << 1.1, 0.3, -0.2, 0.0, 0.9, 0.4, 0.2, -0.1, 1.3;
    Eigen::Vector3d b(0.05, -0.1, 0.2);
    MetricChart pulled;
    pulled.dim = 3;
    pulled.eval = [chart, A, b](std::span<const Jet2> y) {
        std::vector<Jet2> x(3, Jet2::constant(y[0].dim(), 0.0));
        for (int i = 0; i < 3; ++i) {
            x[static_cast<size_t>(i)] = Jet2::constant(y[0].dim(), b[i]);
            for (int j = 0; j < 3; ++j)
                x[static_cast<size_t>(i)] += A(i, j) * y[static_cast<size_t>(j)];
        }
        JetMat gx = chart.eval(x);
        JetMat gy = JetMat::zero(3, 3, y[0].dim());
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 3; ++c) {
                Jet2 s = Jet2::constant(y[0].dim(), 0.0);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) s += A(i, a) * A(j, c) * gx(i, j);
                gy(a, c) = s;
            }
        return gy;
    };
    Eigen::Vector3d y(0.1, 0.2, -0.3);
    Eigen::Vector3d x = A * y + b;
    auto rep_y = curvature_tensors(pulled, std::span<const double>(y.data(), 3));
    auto rep_x = curvature_tensors(chart, std::span<const double>(x.data(), 3));
    CHECK(rep_y.scalar == doctest::Approx(rep_x.scalar).epsilon(1e-9));
}

TEST_CASE("ricci residual sweeps") {
    std::mt19937_64 rng(99);
    auto flat = euclidean_chart(4);
    PointSampler box = [](std::mt19937_64& r) {
        return random_in_box(r, Eigen::VectorXd::Constant(4, -1.0),
                             Eigen::VectorXd::Constant(4, 1.0));
    };
    auto s = ricci_residual_sweep(flat, box, 20, rng);
    CHECK(s.max_residual < 1e-12);
    CHECK(s.failures == 0);

    // round S^7: |Ric - 6 g| translated into the operator norm of Ric shifted
    auto s7 = sphere_chart(7);
    PointSampler ball = [](std::mt19937_64& r) {
        return 0.5 * random_unit_vector(r, 7);
    };
    std::mt19937_64 rng2(7);
    int count = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd p = ball(rng2);
        auto rep = curvature_tensors(s7, std::span<const double>(p.data(), 7));
        Eigen::MatrixXd diff = rep.ricci - 6.0 * rep.metric;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
            0.5 * (diff + diff.transpose()), rep.metric);
        worst = std::max(worst, es.eigenvalues().cwiseAbs().maxCoeff());
        ++count;
    }
    CHECK(count == 100);
    CHECK(worst < 1e-7);
}

TEST_CASE("sweep records failures and continues") {
    MetricChart c = euclidean_chart(2);
    c.valid = [](std::span<const double> p) { return p[0] >= 0.0; };
    int calls = 0;
    PointSampler alternating = [&calls](std::mt19937_64&) {
        ++calls;
        Eigen::VectorXd p(2);
        p << (calls % 2 == 0 ? 1.0 : -1.0), 0.0;
        return p;
    };
    std::mt19937_64 rng(1);
    auto s = ricci_residual_sweep(c, alternating, 10, rng);
    CHECK(s.failures == 5);
    CHECK(s.count == 5);
}
