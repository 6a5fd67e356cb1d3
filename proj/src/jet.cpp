#include "gv/jet.hpp"

#include <cmath>

namespace gv {

std::vector<Jet2> Jet2::seed(std::span<const double> coords) {
    if (coords.empty()) throw InvalidInput("seed: empty coordinate vector");
    const int d = static_cast<int>(coords.size());
    check_dim_range(d);
    std::vector<Jet2> out;
    out.reserve(coords.size());
    for (int i = 0; i < d; ++i) out.push_back(Jet2::variable(d, i, coords[static_cast<size_t>(i)]));
    return out;
}

Jet2 inv(const Jet2& x, double eps_dom) {
    const double v = x.value();
    if (std::abs(v) < eps_dom) throw DomainError("division by near-zero", v);
    const double iv = 1.0 / v;
    return x.compose(iv, -iv * iv, 2.0 * iv * iv * iv);
}

Jet2 sqrt(const Jet2& x, double eps_dom) {
    const double v = x.value();
    if (v < eps_dom) throw DomainError("sqrt of non-positive value", v);
    const double s = std::sqrt(v);
    return x.compose(s, 0.5 / s, -0.25 / (s * v));
}

Jet2 pow(const Jet2& x, double p, double eps_dom) {
    const double v = x.value();
    const double pr = std::round(p);
    if (std::abs(p - pr) < 1e-12) {
        // integer exponent: valid on the whole line (negative powers need v != 0)
        int n = static_cast<int>(pr);
        if (n == 0) return Jet2::constant(x.dim(), 1.0);
        if (n < 0) return inv(pow(x, -p, eps_dom), eps_dom);
        const double f = std::pow(v, n);
        const double fp = n * std::pow(v, n - 1);
        const double fpp = n >= 2 ? n * (n - 1) * std::pow(v, n - 2) : 0.0;
        return x.compose(f, fp, fpp);
    }
    if (v < eps_dom) throw DomainError("fractional power of non-positive value", v);
    const double f = std::pow(v, p);
    return x.compose(f, p * f / v, p * (p - 1.0) * f / (v * v));
}

Jet2 exp(const Jet2& x) {
    const double e = std::exp(x.value());
    return x.compose(e, e, e);
}

Jet2 log(const Jet2& x, double eps_dom) {
    const double v = x.value();
    if (v < eps_dom) throw DomainError("log of non-positive value", v);
    return x.compose(std::log(v), 1.0 / v, -1.0 / (v * v));
}

Jet2 cosh(const Jet2& x) {
    const double c = std::cosh(x.value()), s = std::sinh(x.value());
    return x.compose(c, s, c);
}

Jet2 sinh(const Jet2& x) {
    const double c = std::cosh(x.value()), s = std::sinh(x.value());
    return x.compose(s, c, s);
}

Jet2 tanh(const Jet2& x) {
    const double t = std::tanh(x.value());
    const double sech2 = 1.0 - t * t;
    return x.compose(t, sech2, -2.0 * t * sech2);
}

Jet2 sin(const Jet2& x) {
    const double s = std::sin(x.value()), c = std::cos(x.value());
    return x.compose(s, c, -s);
}

Jet2 cos(const Jet2& x) {
    const double s = std::sin(x.value()), c = std::cos(x.value());
    return x.compose(c, -s, -c);
}

Jet2 tan(const Jet2& x) {
    const double t = std::tan(x.value());
    const double d = 1.0 + t * t;
    return x.compose(t, d, 2.0 * t * d);
}

Jet2 atan(const Jet2& x) {
    const double v = x.value();
    const double d = 1.0 / (1.0 + v * v);
    return x.compose(std::atan(v), d, -2.0 * v * d * d);
}

namespace {

double value_at(const ChartFn& f, std::span<const double> p) {
    auto jets = Jet2::seed(p);
    return f(jets).value();
}

}  // namespace

FdReport fd_check(const ChartFn& f, std::span<const double> point, double h, bool richardson) {
    const int d = static_cast<int>(point.size());
    auto jets = Jet2::seed(point);
    Jet2 y = f(jets);
    std::vector<double> p(point.begin(), point.end());

    auto grad_fd = [&](int i, double step) {
        p[static_cast<size_t>(i)] = point[static_cast<size_t>(i)] + step;
        double fp = value_at(f, p);
        p[static_cast<size_t>(i)] = point[static_cast<size_t>(i)] - step;
        double fm = value_at(f, p);
        p[static_cast<size_t>(i)] = point[static_cast<size_t>(i)];
        return (fp - fm) / (2.0 * step);
    };
    auto hess_diag_fd = [&](int i, double step) {
        double f0 = value_at(f, p);
        p[static_cast<size_t>(i)] = point[static_cast<size_t>(i)] + step;
        double fp = value_at(f, p);
        p[static_cast<size_t>(i)] = point[static_cast<size_t>(i)] - step;
        double fm = value_at(f, p);
        p[static_cast<size_t>(i)] = point[static_cast<size_t>(i)];
        return (fp - 2.0 * f0 + fm) / (step * step);
    };
    auto hess_off_fd = [&](int i, int j, double step) {
        auto at = [&](double si, double sj) {
            p[static_cast<size_t>(i)] = point[static_cast<size_t>(i)] + si;
            p[static_cast<size_t>(j)] = point[static_cast<size_t>(j)] + sj;
            double v = value_at(f, p);
            p[static_cast<size_t>(i)] = point[static_cast<size_t>(i)];
            p[static_cast<size_t>(j)] = point[static_cast<size_t>(j)];
            return v;
        };
        return (at(step, step) - at(step, -step) - at(-step, step) + at(-step, -step)) /
               (4.0 * step * step);
    };
    // Richardson pairing (h, h/2) removes the O(h^2) term of the central stencils.
    auto extrap = [&](auto&& stencil) {
        double a = stencil(h);
        if (!richardson) return a;
        double b = stencil(h * 0.5);
        return (4.0 * b - a) / 3.0;
    };

    FdReport rep;
    for (int i = 0; i < d; ++i) {
        double fd = extrap([&](double s) { return grad_fd(i, s); });
        rep.grad_max = std::max(rep.grad_max, std::abs(fd - y.grad(i)));
        for (int j = i; j < d; ++j) {
            double fdh = (i == j) ? extrap([&](double s) { return hess_diag_fd(i, s); })
                                  : extrap([&](double s) { return hess_off_fd(i, j, s); });
            rep.hess_max = std::max(rep.hess_max, std::abs(fdh - y.hess(i, j)));
        }
    }
    return rep;
}

}  // namespace gv
