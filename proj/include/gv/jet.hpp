#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "gv/errors.hpp"

namespace gv {

// Second-order forward-mode jet over a fixed chart dimension: value, gradient
// and symmetric Hessian. The Hessian is stored as a packed upper triangle, so
// symmetry holds exactly after every operation. All downstream derivative
// work (metric partials, Hessians of level functions, immersion frames) runs
// through this type.
class Jet2 {
public:
    static constexpr int kMaxDim = 16;
    static constexpr double kDefaultDomainFloor = 1e-12;

    Jet2() : dim_(0), val_(0.0) {}

    static Jet2 constant(int dim, double v) {
        check_dim_range(dim);
        Jet2 j;
        j.dim_ = dim;
        j.val_ = v;
        j.g_.fill(0.0);
        j.h_.fill(0.0);
        return j;
    }

    // Seed variable i of a d-dimensional chart.
    static Jet2 variable(int dim, int i, double v) {
        Jet2 j = constant(dim, v);
        j.g_[static_cast<size_t>(i)] = 1.0;
        return j;
    }

    static std::vector<Jet2> seed(std::span<const double> coords);

    int dim() const { return dim_; }
    double value() const { return val_; }
    double grad(int i) const { return g_[static_cast<size_t>(i)]; }
    double hess(int i, int j) const {
        if (i > j) std::swap(i, j);
        return h_[pack(i, j)];
    }

    double& grad_ref(int i) { return g_[static_cast<size_t>(i)]; }
    double& hess_ref(int i, int j) {
        if (i > j) std::swap(i, j);
        return h_[pack(i, j)];
    }

    Jet2 operator-() const {
        Jet2 r = *this;
        r.val_ = -r.val_;
        const int nh = npacked();
        for (int i = 0; i < dim_; ++i) r.g_[static_cast<size_t>(i)] = -r.g_[static_cast<size_t>(i)];
        for (int i = 0; i < nh; ++i) r.h_[static_cast<size_t>(i)] = -r.h_[static_cast<size_t>(i)];
        return r;
    }

    Jet2& operator+=(const Jet2& o) {
        match(o);
        val_ += o.val_;
        const int nh = npacked();
        for (int i = 0; i < dim_; ++i) g_[static_cast<size_t>(i)] += o.g_[static_cast<size_t>(i)];
        for (int i = 0; i < nh; ++i) h_[static_cast<size_t>(i)] += o.h_[static_cast<size_t>(i)];
        return *this;
    }
    Jet2& operator-=(const Jet2& o) {
        match(o);
        val_ -= o.val_;
        const int nh = npacked();
        for (int i = 0; i < dim_; ++i) g_[static_cast<size_t>(i)] -= o.g_[static_cast<size_t>(i)];
        for (int i = 0; i < nh; ++i) h_[static_cast<size_t>(i)] -= o.h_[static_cast<size_t>(i)];
        return *this;
    }
    Jet2& operator+=(double c) {
        val_ += c;
        return *this;
    }
    Jet2& operator-=(double c) {
        val_ -= c;
        return *this;
    }
    Jet2& operator*=(double c) {
        val_ *= c;
        const int nh = npacked();
        for (int i = 0; i < dim_; ++i) g_[static_cast<size_t>(i)] *= c;
        for (int i = 0; i < nh; ++i) h_[static_cast<size_t>(i)] *= c;
        return *this;
    }

    friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
    friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
    friend Jet2 operator+(Jet2 a, double c) { return a += c; }
    friend Jet2 operator+(double c, Jet2 a) { return a += c; }
    friend Jet2 operator-(Jet2 a, double c) { return a -= c; }
    friend Jet2 operator-(double c, const Jet2& a) { return -a + c; }
    friend Jet2 operator*(Jet2 a, double c) { return a *= c; }
    friend Jet2 operator*(double c, Jet2 a) { return a *= c; }
    friend Jet2 operator/(Jet2 a, double c) { return a *= (1.0 / c); }

    friend Jet2 operator*(const Jet2& a, const Jet2& b) {
        a.match(b);
        Jet2 r;
        r.dim_ = a.dim_;
        r.val_ = a.val_ * b.val_;
        for (int i = 0; i < a.dim_; ++i)
            r.g_[static_cast<size_t>(i)] =
                a.val_ * b.g_[static_cast<size_t>(i)] + b.val_ * a.g_[static_cast<size_t>(i)];
        for (int i = 0; i < a.dim_; ++i)
            for (int j = i; j < a.dim_; ++j)
                r.h_[pack(i, j)] = a.val_ * b.h_[pack(i, j)] + b.val_ * a.h_[pack(i, j)] +
                                   a.g_[static_cast<size_t>(i)] * b.g_[static_cast<size_t>(j)] +
                                   a.g_[static_cast<size_t>(j)] * b.g_[static_cast<size_t>(i)];
        return r;
    }

    friend Jet2 operator/(const Jet2& a, const Jet2& b);

    // Chain rule for a scalar function with derivatives (f, fp, fpp) at value().
    Jet2 compose(double f, double fp, double fpp) const {
        Jet2 r;
        r.dim_ = dim_;
        r.val_ = f;
        for (int i = 0; i < dim_; ++i) r.g_[static_cast<size_t>(i)] = fp * g_[static_cast<size_t>(i)];
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j)
                r.h_[pack(i, j)] = fp * h_[pack(i, j)] +
                                   fpp * g_[static_cast<size_t>(i)] * g_[static_cast<size_t>(j)];
        return r;
    }

private:
    static void check_dim_range(int dim) {
        if (dim < 1 || dim > kMaxDim) throw InvalidInput("jet chart dimension out of range");
    }
    void match(const Jet2& o) const {
        if (dim_ != o.dim_) throw InvalidInput("mixed jet chart dimensions");
    }
    static size_t pack(int i, int j) {
        // i <= j, upper triangle row-major
        return static_cast<size_t>(i * kMaxDim - i * (i - 1) / 2 + (j - i));
    }
    int npacked() const { return dim_ * kMaxDim - dim_ * (dim_ - 1) / 2; }

    int dim_;
    double val_;
    std::array<double, kMaxDim> g_;
    std::array<double, kMaxDim*(kMaxDim + 1) / 2> h_;
};

Jet2 inv(const Jet2& x, double eps_dom = Jet2::kDefaultDomainFloor);
Jet2 sqrt(const Jet2& x, double eps_dom = Jet2::kDefaultDomainFloor);
Jet2 pow(const Jet2& x, double p, double eps_dom = Jet2::kDefaultDomainFloor);
Jet2 exp(const Jet2& x);
Jet2 log(const Jet2& x, double eps_dom = Jet2::kDefaultDomainFloor);
Jet2 cosh(const Jet2& x);
Jet2 sinh(const Jet2& x);
Jet2 tanh(const Jet2& x);
Jet2 sin(const Jet2& x);
Jet2 cos(const Jet2& x);
Jet2 tan(const Jet2& x);
Jet2 atan(const Jet2& x);

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * inv(b); }

// Complex scalar as a pair of real jets. No independent complex jet type.
struct CJet {
    Jet2 re, im;

    CJet() = default;
    CJet(Jet2 r, Jet2 i) : re(std::move(r)), im(std::move(i)) {}
    static CJet constant(int dim, double r, double i = 0.0) {
        return CJet(Jet2::constant(dim, r), Jet2::constant(dim, i));
    }
    static CJet from_real(Jet2 r) {
        CJet c;
        c.im = Jet2::constant(r.dim(), 0.0);
        c.re = std::move(r);
        return c;
    }

    CJet conj() const { return CJet(re, -im); }
    Jet2 abs2() const { return re * re + im * im; }

    friend CJet operator+(const CJet& a, const CJet& b) { return CJet(a.re + b.re, a.im + b.im); }
    friend CJet operator-(const CJet& a, const CJet& b) { return CJet(a.re - b.re, a.im - b.im); }
    friend CJet operator-(const CJet& a) { return CJet(-a.re, -a.im); }
    friend CJet operator*(const CJet& a, const CJet& b) {
        return CJet(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend CJet operator*(const Jet2& s, const CJet& b) { return CJet(s * b.re, s * b.im); }
    friend CJet operator*(const CJet& a, const Jet2& s) { return s * a; }
    friend CJet operator*(double s, const CJet& b) { return CJet(s * b.re, s * b.im); }
    friend CJet operator/(const CJet& a, const CJet& b) {
        Jet2 d = inv(b.abs2());
        CJet num = a * b.conj();
        return CJet(num.re * d, num.im * d);
    }
};

using ChartFn = std::function<Jet2(std::span<const Jet2>)>;

// Discrepancy between jet derivatives and Richardson-extrapolated central
// finite differences of the value component; the module's self-oracle.
struct FdReport {
    double grad_max = 0.0;
    double hess_max = 0.0;
    double max() const { return grad_max > hess_max ? grad_max : hess_max; }
};

FdReport fd_check(const ChartFn& f, std::span<const double> point, double h,
                  bool richardson = true);

}  // namespace gv
