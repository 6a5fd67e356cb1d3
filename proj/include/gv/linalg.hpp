#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gv/errors.hpp"
#include "gv/jet.hpp"

namespace gv {

// Dense matrix of jets. Small (d <= 8) and loop-based on purpose; Eigen is
// reserved for plain double work.
class JetMat {
public:
    JetMat() : rows_(0), cols_(0) {}
    JetMat(int rows, int cols, const Jet2& fill)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows * cols), fill) {}
    static JetMat zero(int rows, int cols, int jet_dim) {
        return JetMat(rows, cols, Jet2::constant(jet_dim, 0.0));
    }
    static JetMat identity(int n, int jet_dim) {
        JetMat m = zero(n, n, jet_dim);
        for (int i = 0; i < n; ++i) m(i, i) = Jet2::constant(jet_dim, 1.0);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Jet2& operator()(int i, int j) { return a_[static_cast<size_t>(i * cols_ + j)]; }
    const Jet2& operator()(int i, int j) const { return a_[static_cast<size_t>(i * cols_ + j)]; }

    Eigen::MatrixXd values() const {
        Eigen::MatrixXd m(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).value();
        return m;
    }

private:
    int rows_, cols_;
    std::vector<Jet2> a_;
};

inline JetMat operator*(const JetMat& A, const JetMat& B) {
    if (A.cols() != B.rows()) throw InvalidInput("JetMat product shape mismatch");
    int d = A(0, 0).dim();
    JetMat C = JetMat::zero(A.rows(), B.cols(), d);
    for (int i = 0; i < A.rows(); ++i)
        for (int k = 0; k < A.cols(); ++k) {
            const Jet2& aik = A(i, k);
            for (int j = 0; j < B.cols(); ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

inline JetMat transpose(const JetMat& A) {
    JetMat T = JetMat::zero(A.cols(), A.rows(), A(0, 0).dim());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) T(j, i) = A(i, j);
    return T;
}

// Cholesky factor L (lower) with g = L L^T. Pivots must stay positive.
inline JetMat cholesky(const JetMat& G) {
    int n = G.rows();
    int d = G(0, 0).dim();
    JetMat L = JetMat::zero(n, n, d);
    for (int j = 0; j < n; ++j) {
        Jet2 s = G(j, j);
        for (int k = 0; k < j; ++k) s -= L(j, k) * L(j, k);
        if (s.value() <= 0.0)
            throw LinearSolveError("cholesky: matrix not positive definite", 0.0);
        L(j, j) = sqrt(s);
        Jet2 invd = inv(L(j, j));
        for (int i = j + 1; i < n; ++i) {
            Jet2 t = G(i, j);
            for (int k = 0; k < j; ++k) t -= L(i, k) * L(j, k);
            L(i, j) = t * invd;
        }
    }
    return L;
}

// Gauss-Jordan inverse with partial pivoting on jet values.
inline JetMat inverse(const JetMat& A) {
    int n = A.rows();
    int d = A(0, 0).dim();
    JetMat M = A;
    JetMat I = JetMat::identity(n, d);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(M(r, col).value()) > std::abs(M(piv, col).value())) piv = r;
        if (std::abs(M(piv, col).value()) < 1e-300)
            throw LinearSolveError("jet matrix inverse: singular", 1e300);
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(M(piv, j), M(col, j));
                std::swap(I(piv, j), I(col, j));
            }
        Jet2 ip = inv(M(col, col), 1e-300);
        for (int j = 0; j < n; ++j) {
            M(col, j) = M(col, j) * ip;
            I(col, j) = I(col, j) * ip;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            Jet2 f = M(r, col);
            for (int j = 0; j < n; ++j) {
                M(r, j) -= f * M(col, j);
                I(r, j) -= f * I(col, j);
            }
        }
    }
    return I;
}

// ---- double-precision helpers ----

inline double condition_estimate(const Eigen::MatrixXd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    double smin = svd.singularValues().minCoeff();
    double smax = svd.singularValues().maxCoeff();
    return smin > 0.0 ? smax / smin : 1e300;
}

// Orthonormal basis of the orthogonal complement of the columns of B (thin).
inline Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& B) {
    int n = static_cast<int>(B.rows());
    int k = static_cast<int>(B.cols());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    return Q.rightCols(n - k);
}

// Group sorted eigenvalues into clusters separated by more than tol.
inline std::vector<std::pair<double, int>> cluster_values(Eigen::VectorXd vals, double tol) {
    std::sort(vals.data(), vals.data() + vals.size());
    std::vector<std::pair<double, int>> out;
    int i = 0;
    const int n = static_cast<int>(vals.size());
    while (i < n) {
        int j = i;
        double sum = 0.0;
        while (j < n && (j == i || vals[j] - vals[j - 1] < tol)) {
            sum += vals[j];
            ++j;
        }
        out.emplace_back(sum / (j - i), j - i);
        i = j;
    }
    return out;
}

}  // namespace gv
