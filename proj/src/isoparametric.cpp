#include "gv/isoparametric.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "gv/errors.hpp"
#include "gv/linalg.hpp"
#include "gv/rng.hpp"

namespace gv {

namespace {

Jet2 dot_jets(std::span<const Jet2> x) {
    Jet2 s = Jet2::constant(x[0].dim(), 0.0);
    for (const auto& xi : x) s += xi * xi;
    return s;
}

struct EvalTriple {
    double f;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

EvalTriple eval_family(const IsoparametricFamily& fam, std::span<const double> x) {
    auto jets = Jet2::seed(x);
    Jet2 y = fam.F(jets);
    const int n1 = fam.ambient;
    EvalTriple out;
    out.f = y.value();
    out.grad.resize(n1);
    out.hess.resize(n1, n1);
    for (int i = 0; i < n1; ++i) {
        out.grad[i] = y.grad(i);
        for (int j = 0; j < n1; ++j) out.hess(i, j) = y.hess(i, j);
    }
    return out;
}

}  // namespace

double IsoparametricFamily::value(std::span<const double> x) const {
    auto jets = Jet2::seed(x);
    return F(jets).value();
}

Eigen::VectorXd IsoparametricFamily::gradient(std::span<const double> x) const {
    return eval_family(*this, x).grad;
}

Eigen::MatrixXd IsoparametricFamily::hessian(std::span<const double> x) const {
    return eval_family(*this, x).hess;
}

IsoparametricFamily family_g1(int ambient) {
    if (ambient < 3 || ambient > Jet2::kMaxDim) throw InvalidInput("family_g1: ambient out of range");
    IsoparametricFamily fam;
    fam.tag = "explicit-a";
    fam.ambient = ambient;
    fam.degree = 1;
    fam.m1 = fam.m2 = ambient - 2;
    fam.F = [ambient](std::span<const Jet2> x) { return x[static_cast<size_t>(ambient - 1)]; };
    return fam;
}

IsoparametricFamily family_g2_general(int ambient, int k) {
    if (ambient < 4 || ambient > Jet2::kMaxDim)
        throw InvalidInput("family_g2: ambient out of range");
    if (k < 1 || k > ambient - 3) throw InvalidInput("family_g2: k out of range");
    IsoparametricFamily fam;
    fam.tag = "explicit-b(" + std::to_string(k) + ")";
    fam.ambient = ambient;
    fam.degree = 2;
    // With F = sum_1^{k+1} x^2 - rest, the f=+1 focal set is S^k(1); the
    // constant in  lap F = g^2 (m2-m1)/2 |x|^{g-2}  then pins m1 = n-1-k,
    // m2 = k.
    fam.m1 = ambient - 2 - k;
    fam.m2 = k;
    fam.F = [ambient, k](std::span<const Jet2> x) {
        Jet2 s = Jet2::constant(x[0].dim(), 0.0);
        for (int i = 0; i < ambient; ++i) {
            Jet2 sq = x[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
            if (i <= k)
                s += sq;
            else
                s -= sq;
        }
        return s;
    };
    return fam;
}

IsoparametricFamily family_g2(int k) {
    if (k < 1 || k > 5) throw InvalidInput("family_g2: k must be in 1..5");
    return family_g2_general(8, k);
}

IsoparametricFamily family_g3() {
    IsoparametricFamily fam;
    fam.tag = "explicit-c";
    fam.ambient = 8;
    fam.degree = 3;
    fam.m1 = fam.m2 = 2;
    fam.F = [](std::span<const Jet2> x) {
        const double s3 = std::sqrt(3.0);
        const Jet2 &u = x[0], &v = x[1];
        CJet zx(x[2], x[3]), zy(x[4], x[5]), zz(x[6], x[7]);
        Jet2 ax = zx.abs2(), ay = zy.abs2(), az = zz.abs2();
        CJet xyz = zx * zy * zz;
        return u * u * u - 3.0 * (u * (v * v)) + 1.5 * (u * (ax + ay - 2.0 * az)) +
               1.5 * s3 * (v * (ax - ay)) + 3.0 * s3 * xyz.re;
    };
    return fam;
}

int clifford_delta(int m) {
    static const int table[8] = {1, 2, 4, 4, 8, 8, 8, 8};
    if (m < 1) throw InvalidInput("clifford_delta: m must be >= 1");
    int scale = 1;
    while (m > 8) {
        m -= 8;
        scale *= 16;
    }
    return table[m - 1] * scale;
}

namespace {

// anticommuting skew complex structures on R^{delta(m)}, one fewer than m
std::vector<Eigen::MatrixXd> clifford_generators(int m) {
    auto quat_left = []() {
        Eigen::MatrixXd Li(4, 4), Lj(4, 4), Lk(4, 4);
        Li << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
        Lj << 0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0;
        Lk << 0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
        return std::vector<Eigen::MatrixXd>{Li, Lj, Lk};
    };
    switch (m) {
        case 1:
            return {};
        case 2: {
            Eigen::MatrixXd J(2, 2);
            J << 0, -1, 1, 0;
            return {J};
        }
        case 3: {
            auto L = quat_left();
            return {L[0], L[1]};
        }
        case 4:
            return quat_left();
        case 5: {
            auto L = quat_left();
            Eigen::MatrixXd I4 = Eigen::MatrixXd::Identity(4, 4);
            std::vector<Eigen::MatrixXd> E;
            Eigen::MatrixXd E1 = Eigen::MatrixXd::Zero(8, 8);
            E1.block(0, 4, 4, 4) = -I4;
            E1.block(4, 0, 4, 4) = I4;
            E.push_back(E1);
            for (int i = 0; i < 3; ++i) {
                Eigen::MatrixXd Ei = Eigen::MatrixXd::Zero(8, 8);
                Ei.block(0, 4, 4, 4) = L[static_cast<size_t>(i)];
                Ei.block(4, 0, 4, 4) = L[static_cast<size_t>(i)];
                E.push_back(Ei);
            }
            return E;
        }
        default:
            throw UnsupportedError("clifford_system: m > 5 not provided");
    }
}

}  // namespace

double CliffordSystem::anticommutator_residual() const {
    double worst = 0.0;
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(size, size);
    for (size_t i = 0; i < P.size(); ++i)
        for (size_t j = i; j < P.size(); ++j) {
            Eigen::MatrixXd ac = P[i] * P[j] + P[j] * P[i];
            if (i == j) ac -= 2.0 * I;
            worst = std::max(worst, ac.cwiseAbs().maxCoeff());
        }
    return worst;
}

CliffordSystem clifford_system(int m, int multiplier) {
    if (m < 1) throw InvalidInput("clifford_system: m must be >= 1");
    if (multiplier < 1) throw InvalidInput("clifford_system: multiplier must be >= 1");
    const int delta = clifford_delta(m);
    const int half = delta * multiplier;
    const int N = 2 * half;

    auto gens = clifford_generators(m);
    std::vector<Eigen::MatrixXd> E;
    for (const auto& g : gens) {
        Eigen::MatrixXd big = Eigen::MatrixXd::Zero(half, half);
        for (int b = 0; b < multiplier; ++b) big.block(b * delta, b * delta, delta, delta) = g;
        E.push_back(big);
    }

    CliffordSystem cs;
    cs.m = m;
    cs.multiplier = multiplier;
    cs.size = N;
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(half, half);
    Eigen::MatrixXd P0 = Eigen::MatrixXd::Zero(N, N);
    P0.topLeftCorner(half, half) = I;
    P0.bottomRightCorner(half, half) = -I;
    Eigen::MatrixXd P1 = Eigen::MatrixXd::Zero(N, N);
    P1.topRightCorner(half, half) = I;
    P1.bottomLeftCorner(half, half) = I;
    cs.P = {P0, P1};
    for (const auto& e : E) {
        Eigen::MatrixXd Pi = Eigen::MatrixXd::Zero(N, N);
        Pi.topRightCorner(half, half) = e;
        Pi.bottomLeftCorner(half, half) = -e;
        cs.P.push_back(Pi);
    }
    return cs;
}

IsoparametricFamily family_fkm(const CliffordSystem& cs) {
    const int m1 = cs.m;
    const int m2 = cs.multiplier * clifford_delta(cs.m) - cs.m - 1;
    if (m2 <= 0) throw InvalidInput("family_fkm: non-positive second multiplicity");
    if (cs.size > Jet2::kMaxDim)
        throw InvalidInput("family_fkm: representation dimension beyond jet cap");
    IsoparametricFamily fam;
    fam.tag = "fkm(" + std::to_string(cs.m) + "," + std::to_string(cs.multiplier) + ")";
    fam.ambient = cs.size;
    fam.degree = 4;
    fam.m1 = m1;
    fam.m2 = m2;
    auto P = cs.P;
    const int n1 = cs.size;
    fam.F = [P, n1](std::span<const Jet2> x) {
        Jet2 r2 = dot_jets(x);
        Jet2 out = r2 * r2;
        for (const auto& Pi : P) {
            Jet2 q = Jet2::constant(x[0].dim(), 0.0);
            for (int a = 0; a < n1; ++a) {
                Jet2 row = Jet2::constant(x[0].dim(), 0.0);
                for (int b = 0; b < n1; ++b) {
                    double c = Pi(a, b);
                    if (c != 0.0) row += c * x[static_cast<size_t>(b)];
                }
                q += x[static_cast<size_t>(a)] * row;
            }
            out -= 2.0 * (q * q);
        }
        return out;
    };
    return fam;
}

int SpectrumSummary::total() const {
    int t = 0;
    for (auto& [v, m] : clusters) t += m;
    return t;
}

Eigen::VectorXd SpectrumSummary::sorted_eigenvalues() const {
    Eigen::VectorXd out(total());
    int i = 0;
    for (auto& [v, m] : clusters)
        for (int r = 0; r < m; ++r) out[i++] = v;
    return out;
}

SpectrumSummary cluster_spectrum(const Eigen::VectorXd& eigs, double tol) {
    SpectrumSummary s;
    s.tol = tol;
    s.clusters = cluster_values(eigs, tol);
    for (size_t i = 1; i < s.clusters.size(); ++i)
        if (s.clusters[i].first - s.clusters[i - 1].first < 10.0 * tol) s.well_separated = false;
    return s;
}

std::pair<double, double> munzner_pde_residuals(const IsoparametricFamily& fam,
                                                std::span<const Eigen::VectorXd> points) {
    const double g = fam.degree;
    double r1 = 0.0, r2 = 0.0;
    for (const auto& p : points) {
        if (p.norm() < 1e-8) throw InvalidInput("munzner_pde_residuals: zero point");
        auto e = eval_family(fam, std::span<const double>(p.data(), static_cast<size_t>(p.size())));
        const double x2 = p.squaredNorm();
        const double grad_target = g * g * std::pow(x2, g - 1.0);
        const double lap_target = 0.5 * g * g * (fam.m2 - fam.m1) * std::pow(x2, 0.5 * (g - 2.0));
        r1 = std::max(r1, std::abs(e.grad.squaredNorm() - grad_target));
        r2 = std::max(r2, std::abs(e.hess.trace() - lap_target));
    }
    return {r1, r2};
}

Eigen::VectorXd level_project(const IsoparametricFamily& fam, double t,
                              const Eigen::VectorXd& seed_point, int max_iter) {
    if (!(t > -1.0 && t < 1.0)) throw InvalidInput("level_project: t must lie in (-1,1)");
    if (seed_point.size() != fam.ambient)
        throw InvalidInput("level_project: seed dimension mismatch");
    Eigen::VectorXd x = seed_point.normalized();

    auto residual = [&](const Eigen::VectorXd& p, double& c1, double& c2) {
        c1 = p.squaredNorm() - 1.0;
        c2 = fam.value(std::span<const double>(p.data(), static_cast<size_t>(p.size()))) - t;
        return std::max(std::abs(c1), std::abs(c2));
    };

    double c1, c2;
    double res = residual(x, c1, c2);
    for (int it = 0; it < max_iter && res >= 1e-14; ++it) {
        Eigen::VectorXd gF =
            fam.gradient(std::span<const double>(x.data(), static_cast<size_t>(x.size())));
        Eigen::Matrix2d JJt;
        JJt(0, 0) = 4.0 * x.squaredNorm();
        JJt(0, 1) = JJt(1, 0) = 2.0 * x.dot(gF);
        JJt(1, 1) = gF.squaredNorm();
        Eigen::Vector2d c(c1, c2);
        Eigen::Vector2d s = JJt.fullPivLu().solve(-c);
        Eigen::VectorXd dx = 2.0 * x * s[0] + gF * s[1];

        // damped step with backtracking: f has critical manifolds where the
        // undamped update stalls
        double step = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 30; ++bt) {
            Eigen::VectorXd xn = x + step * dx;
            double n1, n2;
            double rn = residual(xn, n1, n2);
            if (rn < res) {
                x = xn;
                c1 = n1;
                c2 = n2;
                res = rn;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    if (res < 1e-13) return x;
    throw ProjectionFailure("level_project: no convergence", res);
}

ShapeOperator shape_operator(const IsoparametricFamily& fam, const Eigen::VectorXd& x) {
    const int n1 = fam.ambient;
    if (x.size() != n1) throw InvalidInput("shape_operator: point dimension mismatch");
    auto e = eval_family(fam, std::span<const double>(x.data(), static_cast<size_t>(x.size())));
    const double g = fam.degree;
    Eigen::VectorXd sg = e.grad - g * e.f * x;  // spherical gradient
    double ns = sg.norm();
    if (ns <= 1e-8) throw NearFocalError("shape_operator: point too close to a focal set");

    ShapeOperator so;
    so.point = x;
    so.normal = sg / ns;

    Eigen::MatrixXd span2(n1, 2);
    span2.col(0) = x;
    span2.col(1) = so.normal;
    so.tangent_basis = orthogonal_complement(span2);

    // <A X, Y> = (g f <X,Y> - X^T Hess F Y) / |grad_S f|  on T_x W
    Eigen::MatrixXd M = (g * e.f * Eigen::MatrixXd::Identity(n1 - 2, n1 - 2) -
                         so.tangent_basis.transpose() * e.hess * so.tangent_basis) /
                        ns;
    M = 0.5 * (M + M.transpose());
    so.matrix = M;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    so.eigenvalues = es.eigenvalues();
    so.eigenvectors = es.eigenvectors();
    return so;
}

SpectrumSummary hypersurface_spectrum(const IsoparametricFamily& fam, const Eigen::VectorXd& x,
                                      double cluster_tol) {
    return cluster_spectrum(shape_operator(fam, x).eigenvalues, cluster_tol);
}

ConstancySweep constancy_sweep(const IsoparametricFamily& fam, double t, int count,
                               std::mt19937_64& rng) {
    ConstancySweep out;
    Eigen::VectorXd lo, hi;
    bool first = true;
    for (int i = 0; i < count; ++i) {
        try {
            Eigen::VectorXd seed = random_unit_vector(rng, fam.ambient);
            Eigen::VectorXd x = level_project(fam, t, seed);
            Eigen::VectorXd ev = shape_operator(fam, x).eigenvalues;
            if (first) {
                lo = ev;
                hi = ev;
                first = false;
            } else {
                lo = lo.cwiseMin(ev);
                hi = hi.cwiseMax(ev);
            }
            ++out.count;
        } catch (const Error&) {
            ++out.failures;
        }
    }
    if (out.count > 1) out.spread = (hi - lo).maxCoeff();
    return out;
}

Eigen::VectorXd focal_point(const IsoparametricFamily& fam, const Eigen::VectorXd& x, int branch) {
    if (branch != 1 && branch != -1) throw InvalidInput("focal_point: branch must be +-1");
    const double g = fam.degree;
    auto e0 = eval_family(fam, std::span<const double>(x.data(), static_cast<size_t>(x.size())));
    Eigen::VectorXd sg = e0.grad - g * e0.f * x;
    double ns = sg.norm();
    if (ns <= 1e-8) {
        if (e0.f * branch > 1.0 - 1e-10) return x.normalized();
        throw NearFocalError("focal_point: start point is focal on the other branch");
    }
    Eigen::VectorXd nu = sg / ns;

    // along the normal great circle f follows a cosine in g times arclength;
    // use that profile for the initial angle, then polish with Newton on f'=0
    double f0 = std::clamp(e0.f, -1.0, 1.0);
    double psi = std::acos(f0) / g;                       // distance to f=+1 along +nu
    double theta = (branch == 1) ? psi : psi - M_PI / g;  // f=-1 sits half a period back

    auto curve_eval = [&](double th, double& h, double& hp, double& hpp) {
        Eigen::VectorXd gamma = x * std::cos(th) + nu * std::sin(th);
        Eigen::VectorXd gp = -x * std::sin(th) + nu * std::cos(th);
        auto e = eval_family(
            fam, std::span<const double>(gamma.data(), static_cast<size_t>(gamma.size())));
        h = e.f;
        hp = e.grad.dot(gp);
        hpp = gp.dot(e.hess * gp) - e.grad.dot(gamma);
    };

    double h, hp, hpp;
    for (int it = 0; it < 60; ++it) {
        curve_eval(theta, h, hp, hpp);
        if (std::abs(hpp) < 1e-12) break;
        double dth = std::clamp(-hp / hpp, -0.3, 0.3);
        theta += dth;
        if (std::abs(dth) < 1e-15) break;
    }
    curve_eval(theta, h, hp, hpp);
    if (std::abs(h) < 1.0 - 1e-10 || h * branch < 0.0)
        throw FocalSearchError("focal_point: root search did not reach the requested focal set");
    Eigen::VectorXd out = x * std::cos(theta) + nu * std::sin(theta);
    return out.normalized();
}

namespace {

std::vector<Eigen::VectorXd> focal_neighbors(const IsoparametricFamily& fam,
                                             const Eigen::VectorXd& p, int branch, double rho,
                                             int count, std::mt19937_64& rng) {
    std::vector<Eigen::VectorXd> delta;
    delta.reserve(static_cast<size_t>(count));
    const int n1 = fam.ambient;
    int attempts = 0;
    while (static_cast<int>(delta.size()) < count && attempts < 20 * count) {
        ++attempts;
        Eigen::VectorXd eta = random_unit_vector(rng, n1);
        eta -= eta.dot(p) * p;
        double nn = eta.norm();
        if (nn < 1e-3) continue;
        eta /= nn;
        for (double s : {+1.0, -1.0}) {
            if (static_cast<int>(delta.size()) >= count) break;
            Eigen::VectorXd q = (p + s * rho * eta).normalized();
            try {
                delta.push_back(focal_point(fam, q, branch) - p);
            } catch (const Error&) {
            }
        }
    }
    if (static_cast<int>(delta.size()) < count)
        throw UnreliableFitError("focal neighbors: too many projection failures", 0.0);
    return delta;
}

// design matrix of monomials in u up to maxdeg, columns scaled by rho^degree
struct Design {
    Eigen::MatrixXd A;
    std::vector<std::array<int, 3>> quad_cols;  // (i, j, column)
    int cols = 0;
};

Design build_design(const std::vector<Eigen::VectorXd>& u, double rho, int maxdeg) {
    const int q = u.empty() ? 0 : static_cast<int>(u[0].size());
    const int M = static_cast<int>(u.size());
    std::vector<std::array<int, 3>> quads;
    int cols = 1 + q;
    for (int i = 0; i < q; ++i)
        for (int j = i; j < q; ++j) quads.push_back({i, j, cols++});
    std::vector<std::array<int, 3>> cubics;
    int cubic_start = cols;
    if (maxdeg >= 3) {
        for (int i = 0; i < q; ++i)
            for (int j = i; j < q; ++j)
                for (int k = j; k < q; ++k) cubics.push_back({i, j, k});
        cols += static_cast<int>(cubics.size());
    }
    Design d;
    d.cols = cols;
    d.quad_cols = quads;
    d.A.resize(M, cols);
    for (int r = 0; r < M; ++r) {
        const Eigen::VectorXd& v = u[static_cast<size_t>(r)];
        d.A(r, 0) = 1.0;
        for (int i = 0; i < q; ++i) d.A(r, 1 + i) = v[i] / rho;
        for (const auto& t : quads) d.A(r, t[2]) = (v[t[0]] / rho) * (v[t[1]] / rho);
        for (size_t ci = 0; ci < cubics.size(); ++ci) {
            const auto& t = cubics[ci];
            d.A(r, cubic_start + static_cast<int>(ci)) =
                (v[t[0]] / rho) * (v[t[1]] / rho) * (v[t[2]] / rho);
        }
    }
    return d;
}

Eigen::VectorXd lsq_fit(const Design& d, const Eigen::VectorXd& h, double cond_limit) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smin = svd.singularValues().minCoeff();
    double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin > cond_limit)
        throw UnreliableFitError("focal fit ill-conditioned", smin > 0 ? smax / smin : 1e300);
    return svd.solve(h);
}

Eigen::MatrixXd quad_matrix_from_fit(const Design& d, const Eigen::VectorXd& coef, int q,
                                     double rho) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(q, q);
    for (const auto& t : d.quad_cols) {
        double c = coef[t[2]] / (rho * rho);
        if (t[0] == t[1])
            S(t[0], t[0]) = 2.0 * c;
        else
            S(t[0], t[1]) = S(t[1], t[0]) = c;
    }
    return S;
}

}  // namespace

FocalFrames focal_frames(const IsoparametricFamily& fam, const Eigen::VectorXd& p,
                         std::mt19937_64& rng) {
    const int n1 = fam.ambient;
    const double f = fam.value(std::span<const double>(p.data(), static_cast<size_t>(p.size())));
    if (std::abs(f) < 1.0 - 1e-8) throw InvalidInput("focal_frames: point is not focal");
    const int branch = f > 0 ? 1 : -1;
    const int q = fam.focal_dim(branch);

    FocalFrames fr;
    fr.point = p;
    if (q == 0) {
        fr.tangent.resize(n1, 0);
        Eigen::MatrixXd pv(n1, 1);
        pv.col(0) = p;
        fr.normal = orthogonal_complement(pv);
        return fr;
    }

    const double rho = 5e-3;
    auto delta = focal_neighbors(fam, p, branch, rho, std::max(40, 8 * q * (q + 1)), rng);
    const int M = static_cast<int>(delta.size());
    Eigen::MatrixXd D(n1, M);
    for (int i = 0; i < M; ++i) D.col(i) = delta[static_cast<size_t>(i)];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeThinU);
    if (svd.singularValues().size() > q &&
        svd.singularValues()[q] * 10.0 > svd.singularValues()[q - 1])
        throw UnreliableFitError("focal_frames: tangent dimension gap too small",
                                 svd.singularValues()[q - 1] / svd.singularValues()[q]);
    Eigen::MatrixXd T = svd.matrixU().leftCols(q);
    T -= p * (p.transpose() * T);
    T = Eigen::HouseholderQR<Eigen::MatrixXd>(T).householderQ() *
        Eigen::MatrixXd::Identity(n1, q);

    // Refine the split with the principal directions of a local quadratic fit:
    // the linear part of the normal components measures the residual tilt.
    for (int pass = 0; pass < 2; ++pass) {
        Eigen::MatrixXd span1(n1, q + 1);
        span1.leftCols(q) = T;
        span1.col(q) = p;
        Eigen::MatrixXd N = orthogonal_complement(span1);
        std::vector<Eigen::VectorXd> u(static_cast<size_t>(M));
        for (int i = 0; i < M; ++i) u[static_cast<size_t>(i)] = T.transpose() * D.col(i);
        Design des = build_design(u, rho, 2);
        Eigen::MatrixXd L(static_cast<int>(N.cols()), q);
        for (int c = 0; c < N.cols(); ++c) {
            Eigen::VectorXd h(M);
            for (int i = 0; i < M; ++i) h[i] = N.col(c).dot(D.col(i));
            Eigen::VectorXd coef = lsq_fit(des, h, 1e6);
            for (int i = 0; i < q; ++i) L(c, i) = coef[1 + i] / rho;
        }
        Eigen::MatrixXd Tnew = T + N * L;
        Tnew -= p * (p.transpose() * Tnew);
        T = Eigen::HouseholderQR<Eigen::MatrixXd>(Tnew).householderQ() *
            Eigen::MatrixXd::Identity(n1, q);
    }
    fr.tangent = T;
    Eigen::MatrixXd span1(n1, q + 1);
    span1.leftCols(q) = T;
    span1.col(q) = p;
    fr.normal = orthogonal_complement(span1);
    return fr;
}

namespace {

Eigen::MatrixXd focal_quad_fit(const IsoparametricFamily& fam, const Eigen::VectorXd& p,
                               const FocalFrames& fr, const Eigen::VectorXd& xi, double rho,
                               std::mt19937_64& rng) {
    const int branch =
        fam.value(std::span<const double>(p.data(), static_cast<size_t>(p.size()))) > 0 ? 1 : -1;
    const int q = static_cast<int>(fr.tangent.cols());
    int want = std::max(50, 4 * (1 + q + q * (q + 1) / 2 + (q + 2) * (q + 1) * q / 6));
    auto delta = focal_neighbors(fam, p, branch, rho, want, rng);
    const int M = static_cast<int>(delta.size());
    std::vector<Eigen::VectorXd> u(static_cast<size_t>(M));
    Eigen::VectorXd h(M);
    for (int i = 0; i < M; ++i) {
        u[static_cast<size_t>(i)] = fr.tangent.transpose() * delta[static_cast<size_t>(i)];
        h[i] = xi.dot(delta[static_cast<size_t>(i)]);
    }
    Design des = build_design(u, rho, 3);
    Eigen::VectorXd coef = lsq_fit(des, h, 1e6);
    return quad_matrix_from_fit(des, coef, q, rho);
}

}  // namespace

SpectrumSummary focal_spectrum(const IsoparametricFamily& fam, const FocalFrames& fr,
                               const Eigen::VectorXd& xi, std::mt19937_64& rng,
                               double cluster_tol) {
    const Eigen::VectorXd& p = fr.point;
    if (std::abs(xi.norm() - 1.0) > 1e-8) throw InvalidInput("focal_spectrum: xi must be unit");
    if (std::abs(xi.dot(p)) > 1e-5)
        throw InvalidInput("focal_spectrum: xi must be tangent to the sphere");
    if (fr.tangent.cols() == 0) return cluster_spectrum(Eigen::VectorXd(0), cluster_tol);
    if ((fr.tangent.transpose() * xi).norm() > 1e-5)
        throw InvalidInput("focal_spectrum: xi must be normal to the focal submanifold");
    // clean residual components against the fitted split
    Eigen::VectorXd w = xi - p * p.dot(xi) - fr.tangent * (fr.tangent.transpose() * xi);
    w.normalize();

    // two radii, Richardson-combined, to cancel the quartic truncation bias
    const double rho = 4e-3;
    Eigen::MatrixXd S1 = focal_quad_fit(fam, p, fr, w, rho, rng);
    Eigen::MatrixXd S2 = focal_quad_fit(fam, p, fr, w, rho / 2.0, rng);
    Eigen::MatrixXd S = (4.0 * S2 - S1) / 3.0;
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    return cluster_spectrum(es.eigenvalues(), cluster_tol);
}

SpectrumSummary focal_spectrum(const IsoparametricFamily& fam, const Eigen::VectorXd& p,
                               const Eigen::VectorXd& xi, std::mt19937_64& rng,
                               double cluster_tol) {
    const double f = fam.value(std::span<const double>(p.data(), static_cast<size_t>(p.size())));
    if (std::abs(f) < 1.0 - 1e-8) throw InvalidInput("focal_spectrum: point is not focal");
    FocalFrames fr = focal_frames(fam, p, rng);
    return focal_spectrum(fam, fr, xi, rng, cluster_tol);
}

AustereCertificate austere_test(std::span<const SpectrumSummary> spectra, double tol) {
    AustereCertificate cert;
    cert.pass = true;
    for (const auto& s : spectra) {
        const auto& cl = s.clusters;  // ascending
        int i = 0, j = static_cast<int>(cl.size()) - 1;
        while (i <= j) {
            double lo = cl[static_cast<size_t>(i)].first;
            double hi = cl[static_cast<size_t>(j)].first;
            if (i == j) {
                double asym = std::abs(lo);
                cert.worst_asymmetry = std::max(cert.worst_asymmetry, asym);
                if (asym > tol) {
                    cert.pass = false;
                    cert.detail = "unpaired nonzero cluster";
                }
                break;
            }
            if (std::abs(lo) <= tol && std::abs(hi) <= tol) break;  // zeros may stay unpaired
            double asym = std::abs(lo + hi);
            cert.worst_asymmetry = std::max(cert.worst_asymmetry, asym);
            if (asym > tol) {
                cert.pass = false;
                cert.detail = "eigenvalues not symmetric under negation";
                break;
            }
            if (cl[static_cast<size_t>(i)].second != cl[static_cast<size_t>(j)].second) {
                cert.pass = false;
                cert.detail = "negation pair with mismatched multiplicities";
                break;
            }
            ++i;
            --j;
        }
    }
    return cert;
}

const std::vector<Eigen::Matrix3cd>& hermitian_basis() {
    static const std::vector<Eigen::Matrix3cd> basis = [] {
        std::vector<Eigen::Matrix3cd> B;
        const double s2 = 1.0 / std::sqrt(2.0);
        const std::complex<double> I(0.0, 1.0);
        const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (auto& pr : pairs) {
            Eigen::Matrix3cd M = Eigen::Matrix3cd::Zero();
            M(pr[0], pr[1]) = s2;
            M(pr[1], pr[0]) = s2;
            B.push_back(M);
            M.setZero();
            M(pr[0], pr[1]) = -I * s2;
            M(pr[1], pr[0]) = I * s2;
            B.push_back(M);
        }
        Eigen::Matrix3cd D1 = Eigen::Matrix3cd::Zero();
        D1(0, 0) = s2;
        D1(1, 1) = -s2;
        B.push_back(D1);
        Eigen::Matrix3cd D2 = Eigen::Matrix3cd::Zero();
        const double s6 = 1.0 / std::sqrt(6.0);
        D2(0, 0) = s6;
        D2(1, 1) = s6;
        D2(2, 2) = -2.0 * s6;
        B.push_back(D2);
        return B;
    }();
    return basis;
}

Eigen::VectorXd adjoint_orbit_sample(const Eigen::Vector3d& lambda, const Eigen::Matrix3cd& U) {
    if (std::abs(lambda.sum()) > 1e-10)
        throw InvalidInput("adjoint_orbit_sample: eigenvalues must sum to zero");
    if (std::abs(lambda.squaredNorm() - 1.0) > 1e-10)
        throw InvalidInput("adjoint_orbit_sample: eigenvalues must have unit norm");
    if ((U * U.adjoint() - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff() > 1e-10)
        throw InvalidInput("adjoint_orbit_sample: U must be unitary");
    Eigen::Matrix3cd X = U * lambda.cast<std::complex<double>>().asDiagonal() * U.adjoint();
    Eigen::VectorXd out(8);
    const auto& B = hermitian_basis();
    for (int a = 0; a < 8; ++a) out[a] = (X * B[static_cast<size_t>(a)]).trace().real();
    return out;
}

double adjoint_orbit_f(const Eigen::VectorXd& x8) {
    if (x8.size() != 8) throw InvalidInput("adjoint_orbit_f: expects an 8-vector");
    Eigen::Matrix3cd X = Eigen::Matrix3cd::Zero();
    const auto& B = hermitian_basis();
    for (int a = 0; a < 8; ++a) X += x8[a] * B[static_cast<size_t>(a)];
    return 3.0 * std::sqrt(6.0) * X.determinant().real();
}

std::string family_to_manifest(const IsoparametricFamily& fam) {
    nlohmann::ordered_json j;
    if (fam.tag == "explicit-a") {
        j["kind"] = "g1";
        j["ambient"] = fam.ambient;
    } else if (fam.tag.rfind("explicit-b", 0) == 0) {
        j["kind"] = "g2";
        j["ambient"] = fam.ambient;
        j["k"] = fam.m2;
    } else if (fam.tag == "explicit-c") {
        j["kind"] = "g3";
    } else if (fam.tag.rfind("fkm", 0) == 0) {
        j["kind"] = "fkm";
        auto open = fam.tag.find('(');
        auto comma = fam.tag.find(',');
        auto close = fam.tag.find(')');
        j["m"] = std::stoi(fam.tag.substr(open + 1, comma - open - 1));
        j["multiplier"] = std::stoi(fam.tag.substr(comma + 1, close - comma - 1));
    } else {
        throw InvalidInput("family_to_manifest: unknown provenance tag");
    }
    j["degree"] = fam.degree;
    j["multiplicities"] = {fam.m1, fam.m2};
    return j.dump();
}

IsoparametricFamily family_from_manifest(const std::string& manifest) {
    nlohmann::json j = nlohmann::json::parse(manifest);
    std::string kind = j.at("kind");
    if (kind == "g1") return family_g1(j.value("ambient", 8));
    if (kind == "g2") {
        int ambient = j.value("ambient", 8);
        int k = j.at("k");
        return ambient == 8 ? family_g2(k) : family_g2_general(ambient, k);
    }
    if (kind == "g3") return family_g3();
    if (kind == "fkm") return family_fkm(clifford_system(j.at("m"), j.at("multiplier")));
    throw InvalidInput("family_from_manifest: unknown kind " + kind);
}

}  // namespace gv
