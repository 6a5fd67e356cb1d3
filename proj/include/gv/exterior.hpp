#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gv/errors.hpp"
#include "gv/jet.hpp"

namespace gv {

// binomial coefficients up to the jet dimension cap
long binom(int n, int k);

// Lexicographic rank of a strictly increasing k-tuple among C(n,k).
long tuple_rank(int n, std::span<const int> tuple);
std::vector<int> tuple_unrank(int n, int k, long rank);

// Sorts indices, returns permutation sign, or 0 if a repeat occurs.
int sort_sign(std::vector<int>& idx);

// Degree-k alternating multilinear form at a point with dense coefficients
// over a coordinate coframe, keyed by strictly increasing index tuples.
// Degree 0 is a scalar; degree > dim is identically zero.
template <class T>
class Alt {
public:
    Alt() : dim_(0), deg_(0) {}
    Alt(int dim, int deg, T zero) : dim_(dim), deg_(deg), zero_(zero) {
        if (dim < 0 || deg < 0) throw InvalidInput("alternating tensor: negative dim/degree");
        long n = (deg <= dim) ? binom(dim, deg) : 0;
        c_.assign(static_cast<size_t>(n), zero);
    }

    int dim() const { return dim_; }
    int degree() const { return deg_; }
    size_t terms() const { return c_.size(); }

    const T& coeff_by_rank(long r) const { return c_[static_cast<size_t>(r)]; }
    T& coeff_by_rank(long r) { return c_[static_cast<size_t>(r)]; }

    // coefficient on a strictly increasing tuple
    T& coeff(std::span<const int> tuple) { return c_[static_cast<size_t>(tuple_rank(dim_, tuple))]; }
    const T& coeff(std::span<const int> tuple) const {
        return c_[static_cast<size_t>(tuple_rank(dim_, tuple))];
    }

    // evaluation on an arbitrary index order, applying the permutation sign
    T component(std::vector<int> idx) const {
        int s = sort_sign(idx);
        if (s == 0 || deg_ > dim_) return zero_;
        T v = coeff(idx);
        if (s < 0) return static_cast<T>(-v);
        return v;
    }

    const T& zero_element() const { return zero_; }

private:
    int dim_, deg_;
    T zero_;
    std::vector<T> c_;
};

using AltD = Alt<double>;
using AltJ = Alt<Jet2>;

template <class T>
Alt<T> operator+(const Alt<T>& a, const Alt<T>& b) {
    if (a.dim() != b.dim() || a.degree() != b.degree())
        throw InvalidInput("alternating tensor sum: shape mismatch");
    Alt<T> r = a;
    for (size_t i = 0; i < r.terms(); ++i)
        r.coeff_by_rank(static_cast<long>(i)) += b.coeff_by_rank(static_cast<long>(i));
    return r;
}

template <class T, class S>
Alt<T> operator*(const Alt<T>& a, const S& s) {
    Alt<T> r = a;
    for (size_t i = 0; i < r.terms(); ++i)
        r.coeff_by_rank(static_cast<long>(i)) = r.coeff_by_rank(static_cast<long>(i)) * s;
    return r;
}

// graded-anticommutative wedge product
template <class T>
Alt<T> wedge(const Alt<T>& a, const Alt<T>& b) {
    if (a.dim() != b.dim()) throw InvalidInput("wedge: dimension mismatch");
    int n = a.dim(), k = a.degree(), l = b.degree();
    Alt<T> r(n, k + l, a.zero_element());
    if (k + l > n) return r;
    std::vector<int> ta(static_cast<size_t>(k)), tb(static_cast<size_t>(l)),
        merged(static_cast<size_t>(k + l));
    for (long ra = 0; ra < static_cast<long>(a.terms()); ++ra) {
        auto I = tuple_unrank(n, k, ra);
        for (long rb = 0; rb < static_cast<long>(b.terms()); ++rb) {
            auto J = tuple_unrank(n, l, rb);
            merged.clear();
            merged.insert(merged.end(), I.begin(), I.end());
            merged.insert(merged.end(), J.begin(), J.end());
            std::vector<int> sorted = merged;
            int s = sort_sign(sorted);
            if (s == 0) continue;
            T term = a.coeff_by_rank(ra) * b.coeff_by_rank(rb);
            if (s < 0) term = static_cast<T>(-term);
            r.coeff(sorted) += term;
        }
    }
    return r;
}

// interior product v . a  (degree drops by one)
template <class T>
Alt<T> interior(std::span<const double> v, const Alt<T>& a) {
    if (static_cast<int>(v.size()) != a.dim()) throw InvalidInput("interior: dimension mismatch");
    if (a.degree() == 0) throw InvalidInput("interior: degree-0 input");
    int n = a.dim(), k = a.degree();
    Alt<T> r(n, k - 1, a.zero_element());
    if (k > n) return r;
    for (long ra = 0; ra < static_cast<long>(a.terms()); ++ra) {
        auto I = tuple_unrank(n, k, ra);
        for (int p = 0; p < k; ++p) {
            double vp = v[static_cast<size_t>(I[static_cast<size_t>(p)])];
            if (vp == 0.0) continue;
            std::vector<int> J;
            J.reserve(static_cast<size_t>(k - 1));
            for (int q = 0; q < k; ++q)
                if (q != p) J.push_back(I[static_cast<size_t>(q)]);
            T term = a.coeff_by_rank(ra) * vp;
            if (p % 2 == 1) term = static_cast<T>(-term);
            r.coeff(J) += term;
        }
    }
    return r;
}

// inner product of same-degree forms under a Riemannian metric
double inner_product(const AltD& a, const AltD& b, const Eigen::MatrixXd& metric);

// Hodge star with respect to a positive-definite metric and an orientation
// sign for e^{1..n}. Satisfies a ^ *b = <a,b> vol.
AltD hodge_star(const AltD& a, const Eigen::MatrixXd& metric, int orientation = +1);

// Chart-dependent form: coefficients evaluable as jets at each chart point.
struct FormField {
    int dim = 0;
    int degree = 0;
    std::function<AltJ(std::span<const Jet2>)> eval;
};

// d computed from coefficient jet gradients at a point.
AltD exterior_derivative(const FormField& F, std::span<const double> point);

// d(dF) assembled by central finite differences of exterior_derivative around
// the point; the independent symmetry-of-mixed-partials oracle for d^2 = 0.
AltD exterior_derivative_squared_fd(const FormField& F, std::span<const double> point,
                                    double h = 1e-3);

// The dim-7 three-form with unit coefficients on
// 125, -345, 136, -426, 147, -237, 567.
AltD g2_three_form();

// Induced metric of a nondegenerate 3-form in dim 7, normalized so the
// canonical form above maps to the identity.
Eigen::MatrixXd metric_from_three_form(const AltD& phi);

}  // namespace gv
