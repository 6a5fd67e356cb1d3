#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "gv/jet.hpp"

using namespace gv;

TEST_CASE("seeding") {
    std::vector<double> one = {2.0};
    auto j = Jet2::seed(one);
    CHECK(j[0].value() == 2.0);
    CHECK(j[0].grad(0) == 1.0);
    CHECK(j[0].hess(0, 0) == 0.0);

    std::vector<double> empty;
    CHECK_THROWS_AS(Jet2::seed(empty), InvalidInput);
}

TEST_CASE("product rule x*y at (1,0)") {
    std::vector<double> p = {1.0, 0.0};
    auto j = Jet2::seed(p);
    Jet2 xy = j[0] * j[1];
    CHECK(xy.value() == 0.0);
    CHECK(xy.grad(0) == 0.0);
    CHECK(xy.grad(1) == 1.0);
    CHECK(xy.hess(0, 1) == 1.0);
    CHECK(xy.hess(0, 0) == 0.0);
}

TEST_CASE("cube at 3") {
    std::vector<double> p = {3.0};
    auto j = Jet2::seed(p);
    Jet2 c = j[0] * j[0] * j[0];
    CHECK(c.value() == 27.0);
    CHECK(c.grad(0) == 27.0);
    CHECK(c.hess(0, 0) == 18.0);
}

TEST_CASE("cosh at zero") {
    std::vector<double> p = {0.0};
    auto j = Jet2::seed(p);
    Jet2 c = cosh(j[0]);
    CHECK(c.value() == 1.0);
    CHECK(c.grad(0) == 0.0);
    CHECK(c.hess(0, 0) == 1.0);
}

TEST_CASE("(lambda + r^2)^{2/3} stationary at r=0") {
    std::vector<double> p = {0.0};
    auto j = Jet2::seed(p);
    Jet2 v = pow(1.0 + j[0] * j[0], 2.0 / 3.0);
    CHECK(v.value() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v.grad(0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("domain errors carry the offending value") {
    std::vector<double> p = {1e-15};
    auto j = Jet2::seed(p);
    CHECK_THROWS_AS(inv(j[0]), DomainError);
    CHECK_THROWS_AS(pow(j[0] - 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(log(-1.0 + j[0]), DomainError);
    try {
        inv(j[0]);
    } catch (const DomainError& e) {
        CHECK(e.value == 1e-15);
    }
}

TEST_CASE("mixed chart dimensions rejected") {
    std::vector<double> p2 = {1.0, 2.0};
    std::vector<double> p3 = {1.0, 2.0, 3.0};
    auto a = Jet2::seed(p2);
    auto b = Jet2::seed(p3);
    CHECK_THROWS_AS(a[0] + b[0], InvalidInput);
    CHECK_THROWS_AS(a[0] * b[1], InvalidInput);
}

TEST_CASE("elementary battery vs Richardson finite differences") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(0.3, 1.4);
    auto rel = [](double d, double scale) { return d / std::max(1.0, std::abs(scale)); };

    std::vector<std::pair<const char*, ChartFn>> battery = {
        {"poly", [](std::span<const Jet2> x) { return x[0] * x[0] * x[1] - 3.0 * x[2] + x[1] * x[2] * x[0]; }},
        {"rational", [](std::span<const Jet2> x) { return (x[0] + 2.0 * x[1]) / (1.0 + x[2] * x[2]); }},
        {"sqrtpow", [](std::span<const Jet2> x) { return sqrt(x[0] + 2.0) * pow(x[1] + 1.5, 1.7); }},
        {"expcoshsinh", [](std::span<const Jet2> x) { return exp(0.3 * x[0]) * cosh(x[1]) + sinh(x[2] * x[0]); }},
        {"trig", [](std::span<const Jet2> x) { return sin(x[0]) * cos(x[1]) + tan(0.4 * x[2]); }},
        {"logatan", [](std::span<const Jet2> x) { return log(1.0 + x[0] * x[0]) + atan(x[1] - x[2]); }},
        {"warp", [](std::span<const Jet2> x) {
             Jet2 r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
             return pow(1.0 + r2, 2.0 / 3.0) + pow(1.0 + r2, -1.0 / 3.0);
         }},
    };
    for (auto& [name, f] : battery) {
        CAPTURE(name);
        for (int trial = 0; trial < 4; ++trial) {
            std::vector<double> p = {unif(rng), unif(rng), unif(rng)};
            auto rep = fd_check(f, p, 1e-3);
            CHECK(rel(rep.grad_max, 1.0) < 1e-6);
            CHECK(rel(rep.hess_max, 1.0) < 1e-6);
        }
    }

    // spec step: low-op composites agree at h = 1e-4 too
    std::vector<ChartFn> simple = {
        [](std::span<const Jet2> x) { return x[0] * x[0] * x[0]; },
        [](std::span<const Jet2> x) { return x[0] * x[1] + x[2]; },
        [](std::span<const Jet2> x) { return sqrt(x[0] + 2.0); },
    };
    for (auto& f : simple) {
        std::vector<double> p = {unif(rng), unif(rng), unif(rng)};
        auto rep = fd_check(f, p, 1e-4);
        CHECK(rep.max() < 1e-6);
    }
}

TEST_CASE("|x|^4 in R^8 vs finite differences") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    std::vector<double> p(8);
    for (auto& v : p) v = gauss(rng);
    ChartFn f = [](std::span<const Jet2> x) {
        Jet2 r2 = Jet2::constant(x[0].dim(), 0.0);
        for (const auto& xi : x) r2 += xi * xi;
        return r2 * r2;
    };
    auto rep = fd_check(f, p, 1e-2);
    CHECK(rep.max() < 1e-6);
}

TEST_CASE("linear form has exactly zero Hessian") {
    std::vector<double> p = {0.4, -1.1, 2.2};
    ChartFn f = [](std::span<const Jet2> x) { return 2.0 * x[0] - 3.0 * x[1] + 0.5 * x[2]; };
    auto jets = Jet2::seed(p);
    Jet2 y = f(jets);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(y.hess(i, j) == 0.0);
    auto rep = fd_check(f, p, 1e-4);
    CHECK(rep.hess_max < 1e-6);  // pure stencil roundoff for a linear form
}

TEST_CASE("composition value agrees with symbolic composite") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.2, 1.2);
    for (int t = 0; t < 16; ++t) {
        std::vector<double> p = {unif(rng), unif(rng)};
        auto j = Jet2::seed(p);
        // f(g(x)) with g = x0*x1 + 1, f = exp(sqrt(.))
        Jet2 g = j[0] * j[1] + 1.0;
        Jet2 via_jets = exp(sqrt(g));
        double direct = std::exp(std::sqrt(p[0] * p[1] + 1.0));
        CHECK(std::abs(via_jets.value() - direct) < 1e-12);
    }
}

TEST_CASE("hessian symmetry is structural") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    for (int t = 0; t < 8; ++t) {
        std::vector<double> p = {unif(rng), unif(rng), unif(rng), unif(rng)};
        auto j = Jet2::seed(p);
        Jet2 y = sinh(j[0] * j[3]) * pow(j[1] + j[2], 2.5) / (j[0] + j[1]);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) CHECK(y.hess(a, b) == y.hess(b, a));
    }
}

TEST_CASE("complex jets multiply like complex numbers") {
    std::vector<double> p = {0.7, -0.3};
    auto j = Jet2::seed(p);
    CJet z(j[0], j[1]);
    CJet w = z * z * z.conj();
    std::complex<double> zc(0.7, -0.3);
    std::complex<double> wc = zc * zc * std::conj(zc);
    CHECK(w.re.value() == doctest::Approx(wc.real()).epsilon(1e-14));
    CHECK(w.im.value() == doctest::Approx(wc.imag()).epsilon(1e-14));
    CJet q = w / z;
    std::complex<double> qc = wc / zc;
    CHECK(q.re.value() == doctest::Approx(qc.real()).epsilon(1e-13));
    CHECK(q.im.value() == doctest::Approx(qc.imag()).epsilon(1e-13));
}
