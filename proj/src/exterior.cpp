#include "gv/exterior.hpp"

#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace gv {

namespace {
constexpr int kMaxN = Jet2::kMaxDim;
}

long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    static std::array<std::array<long, kMaxN + 1>, kMaxN + 1> table = [] {
        std::array<std::array<long, kMaxN + 1>, kMaxN + 1> t{};
        for (int i = 0; i <= kMaxN; ++i) {
            t[static_cast<size_t>(i)][0] = 1;
            for (int j = 1; j <= i; ++j)
                t[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    t[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] +
                    t[static_cast<size_t>(i - 1)][static_cast<size_t>(j)];
        }
        return t;
    }();
    if (n > kMaxN) throw InvalidInput("binom: dimension beyond cap");
    return table[static_cast<size_t>(n)][static_cast<size_t>(k)];
}

long tuple_rank(int n, std::span<const int> tuple) {
    const int k = static_cast<int>(tuple.size());
    long r = 0;
    int prev = -1;
    for (int p = 0; p < k; ++p) {
        int t = tuple[static_cast<size_t>(p)];
        if (t <= prev || t >= n) throw InvalidInput("tuple_rank: not strictly increasing in range");
        for (int v = prev + 1; v < t; ++v) r += binom(n - 1 - v, k - 1 - p);
        prev = t;
    }
    return r;
}

std::vector<int> tuple_unrank(int n, int k, long rank) {
    std::vector<int> out;
    out.reserve(static_cast<size_t>(k));
    int v = 0;
    for (int p = 0; p < k; ++p) {
        while (true) {
            long c = binom(n - 1 - v, k - 1 - p);
            if (rank < c) break;
            rank -= c;
            ++v;
        }
        out.push_back(v++);
    }
    return out;
}

int sort_sign(std::vector<int>& idx) {
    int s = 1;
    const size_t k = idx.size();
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j) {
            if (idx[i] == idx[j]) return 0;
            if (idx[i] > idx[j]) {
                std::swap(idx[i], idx[j]);
                s = -s;
            }
        }
    return s;
}

double inner_product(const AltD& a, const AltD& b, const Eigen::MatrixXd& metric) {
    if (a.dim() != b.dim() || a.degree() != b.degree())
        throw InvalidInput("inner_product: shape mismatch");
    const int n = a.dim(), k = a.degree();
    Eigen::MatrixXd ginv = metric.inverse();
    double total = 0.0;
    // <e^I, e^J> = det(g^{i_a j_b})
    Eigen::MatrixXd G(k, k);
    for (long ra = 0; ra < static_cast<long>(a.terms()); ++ra) {
        auto I = tuple_unrank(n, k, ra);
        for (long rb = 0; rb < static_cast<long>(b.terms()); ++rb) {
            auto J = tuple_unrank(n, k, rb);
            for (int p = 0; p < k; ++p)
                for (int q = 0; q < k; ++q)
                    G(p, q) = ginv(I[static_cast<size_t>(p)], J[static_cast<size_t>(q)]);
            total += a.coeff_by_rank(ra) * b.coeff_by_rank(rb) * G.determinant();
        }
    }
    return total;
}

AltD hodge_star(const AltD& a, const Eigen::MatrixXd& metric, int orientation) {
    const int n = a.dim(), k = a.degree();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(metric);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw InvalidInput("hodge_star: metric not positive definite");
    const double sqrt_det = std::sqrt(metric.determinant());
    Eigen::MatrixXd ginv = metric.inverse();

    AltD star(n, n - k, 0.0);
    Eigen::MatrixXd G(k, k);
    // (*a)_{comp(I)} * sign(I, comp(I)) = <e^I, a> sqrt(det g), for every I
    for (long ri = 0; ri < binom(n, k); ++ri) {
        auto I = tuple_unrank(n, k, ri);
        double ip = 0.0;
        for (long ra = 0; ra < static_cast<long>(a.terms()); ++ra) {
            auto J = tuple_unrank(n, k, ra);
            for (int p = 0; p < k; ++p)
                for (int q = 0; q < k; ++q)
                    G(p, q) = ginv(I[static_cast<size_t>(p)], J[static_cast<size_t>(q)]);
            double det = (k == 0) ? 1.0 : G.determinant();
            ip += a.coeff_by_rank(ra) * det;
        }
        // complement of I and the sign of the shuffle I, comp(I)
        std::vector<char> in(static_cast<size_t>(n), 0);
        for (int v : I) in[static_cast<size_t>(v)] = 1;
        std::vector<int> comp;
        comp.reserve(static_cast<size_t>(n - k));
        for (int v = 0; v < n; ++v)
            if (!in[static_cast<size_t>(v)]) comp.push_back(v);
        std::vector<int> full(I.begin(), I.end());
        full.insert(full.end(), comp.begin(), comp.end());
        int s = sort_sign(full);
        star.coeff(comp) += s * orientation * ip * sqrt_det;
    }
    return star;
}

AltD exterior_derivative(const FormField& F, std::span<const double> point) {
    if (static_cast<int>(point.size()) != F.dim)
        throw InvalidInput("exterior_derivative: point dimension mismatch");
    auto jets = Jet2::seed(point);
    AltJ val = F.eval(jets);
    const int n = F.dim, k = F.degree;
    AltD d(n, k + 1, 0.0);
    if (k + 1 > n) return d;
    for (long ra = 0; ra < static_cast<long>(val.terms()); ++ra) {
        auto I = tuple_unrank(n, k, ra);
        const Jet2& c = val.coeff_by_rank(ra);
        for (int i = 0; i < n; ++i) {
            double gi = c.grad(i);
            if (gi == 0.0) continue;
            std::vector<int> J;
            J.reserve(static_cast<size_t>(k + 1));
            J.push_back(i);
            J.insert(J.end(), I.begin(), I.end());
            int s = sort_sign(J);
            if (s == 0) continue;
            d.coeff(J) += s * gi;
        }
    }
    return d;
}

AltD exterior_derivative_squared_fd(const FormField& F, std::span<const double> point, double h) {
    const int n = F.dim, k = F.degree;
    AltD dd(n, k + 2, 0.0);
    if (k + 2 > n) return dd;
    std::vector<double> p(point.begin(), point.end());
    for (int i = 0; i < n; ++i) {
        p[static_cast<size_t>(i)] = point[static_cast<size_t>(i)] + h;
        AltD dp = exterior_derivative(F, p);
        p[static_cast<size_t>(i)] = point[static_cast<size_t>(i)] - h;
        AltD dm = exterior_derivative(F, p);
        p[static_cast<size_t>(i)] = point[static_cast<size_t>(i)];
        for (long r = 0; r < static_cast<long>(dp.terms()); ++r) {
            double deriv = (dp.coeff_by_rank(r) - dm.coeff_by_rank(r)) / (2.0 * h);
            if (deriv == 0.0) continue;
            auto I = tuple_unrank(n, k + 1, r);
            std::vector<int> J;
            J.reserve(static_cast<size_t>(k + 2));
            J.push_back(i);
            J.insert(J.end(), I.begin(), I.end());
            int s = sort_sign(J);
            if (s == 0) continue;
            dd.coeff(J) += s * deriv;
        }
    }
    return dd;
}

AltD g2_three_form() {
    AltD phi(7, 3, 0.0);
    auto set = [&](int a, int b, int c, double v) {
        std::vector<int> t = {a - 1, b - 1, c - 1};
        int s = sort_sign(t);
        phi.coeff(t) = s * v;
    };
    set(1, 2, 5, 1.0);
    set(3, 4, 5, -1.0);
    set(1, 3, 6, 1.0);
    set(4, 2, 6, -1.0);
    set(1, 4, 7, 1.0);
    set(2, 3, 7, -1.0);
    set(5, 6, 7, 1.0);
    return phi;
}

Eigen::MatrixXd metric_from_three_form(const AltD& phi) {
    if (phi.dim() != 7 || phi.degree() != 3)
        throw InvalidInput("metric_from_three_form: expects a 3-form in dim 7");
    // B_ij vol = (e_i . phi) ^ (e_j . phi) ^ phi
    Eigen::MatrixXd B(7, 7);
    std::vector<AltD> contr;
    contr.reserve(7);
    for (int i = 0; i < 7; ++i) {
        std::vector<double> e(7, 0.0);
        e[static_cast<size_t>(i)] = 1.0;
        contr.push_back(interior<double>(e, phi));
    }
    std::vector<int> top = {0, 1, 2, 3, 4, 5, 6};
    for (int i = 0; i < 7; ++i)
        for (int j = i; j < 7; ++j) {
            AltD w = wedge(wedge(contr[static_cast<size_t>(i)], contr[static_cast<size_t>(j)]), phi);
            B(i, j) = B(j, i) = w.coeff(top);
        }
    const double det = B.determinant();
    if (std::abs(det) < 1e-10) throw DegenerateFormError("three-form outside the open orbit");
    // Unique determinant power making the map scale-consistent; the constant
    // is pinned by the canonical form mapping to the identity. The spectral
    // absolute value fixes the sign convention equivariantly: it is a no-op on
    // definite candidates and commutes with orthogonal conjugation.
    Eigen::MatrixXd pre =
        B * std::pow(6.0, -2.0 / 9.0) * std::pow(std::abs(det), -1.0 / 9.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pre);
    Eigen::VectorXd lam = es.eigenvalues();
    double lmax = lam.cwiseAbs().maxCoeff();
    for (int i = 0; i < 7; ++i) {
        if (std::abs(lam[i]) < 1e-8 * lmax)
            throw DegenerateFormError("three-form induces a degenerate bilinear form");
        lam[i] = std::abs(lam[i]);
    }
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace gv
