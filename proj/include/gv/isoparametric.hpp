#pragma once

#include <complex>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gv/jet.hpp"

namespace gv {

// A Cartan-Munzner polynomial F on R^{n+1}, homogeneous of degree g, whose
// restriction f to the unit sphere carves the sphere into the level family
// W_t = f^{-1}(t) and the two focal sets W_{+-} = f^{-1}(+-1).
struct IsoparametricFamily {
    std::string tag;       // explicit-a | explicit-b(k) | explicit-c | fkm(m,l)
    int ambient = 0;       // n+1
    int degree = 0;        // g, number of distinct principal curvatures
    int m1 = 0, m2 = 0;    // curvature multiplicities, alternating
    std::function<Jet2(std::span<const Jet2>)> F;

    double value(std::span<const double> x) const;
    Eigen::VectorXd gradient(std::span<const double> x) const;
    Eigen::MatrixXd hessian(std::span<const double> x) const;
    // dimension of the focal set on the given side (+1 or -1 level of f)
    int focal_dim(int sign) const { return ambient - 2 - (sign > 0 ? m1 : m2); }
};

IsoparametricFamily family_g1(int ambient = 8);
IsoparametricFamily family_g2(int k);                 // ambient 8, 1 <= k <= 5
IsoparametricFamily family_g2_general(int ambient, int k);
IsoparametricFamily family_g3();                      // ambient 8

// Symmetric orthogonal anticommuting matrices P_0..P_m on R^{2 l delta(m)}.
struct CliffordSystem {
    int m = 0;
    int multiplier = 0;
    int size = 0;
    std::vector<Eigen::MatrixXd> P;
    double anticommutator_residual() const;
};

int clifford_delta(int m);
CliffordSystem clifford_system(int m, int multiplier);
IsoparametricFamily family_fkm(const CliffordSystem& cs);

// Eigenvalues grouped within a clustering tolerance.
struct SpectrumSummary {
    std::vector<std::pair<double, int>> clusters;  // (value, multiplicity), ascending
    double tol = 1e-6;
    bool well_separated = true;  // clusters more than 10x tol apart
    int total() const;
    Eigen::VectorXd sorted_eigenvalues() const;
};

SpectrumSummary cluster_spectrum(const Eigen::VectorXd& eigs, double tol = 1e-6);

// max |  |grad F|^2 - g^2 |x|^{2g-2} |  and  max | lap F - g^2 (m2-m1)/2 |x|^{g-2} |
std::pair<double, double> munzner_pde_residuals(const IsoparametricFamily& fam,
                                                std::span<const Eigen::VectorXd> points);

// Projected damped Newton onto |x| = 1, f(x) = t.
Eigen::VectorXd level_project(const IsoparametricFamily& fam, double t,
                              const Eigen::VectorXd& seed_point, int max_iter = 100);

// Shape operator data of the level hypersurface through x (unit normal along
// the spherical gradient of f, toward increasing f).
struct ShapeOperator {
    Eigen::VectorXd point;
    Eigen::VectorXd normal;             // in T_x S^n
    Eigen::MatrixXd tangent_basis;      // (n+1) x (n-1), orthonormal
    Eigen::MatrixXd matrix;             // (n-1) x (n-1) symmetric in that basis
    Eigen::VectorXd eigenvalues;        // ascending
    Eigen::MatrixXd eigenvectors;       // columns, in tangent_basis coordinates
};

ShapeOperator shape_operator(const IsoparametricFamily& fam, const Eigen::VectorXd& x);
SpectrumSummary hypersurface_spectrum(const IsoparametricFamily& fam, const Eigen::VectorXd& x,
                                      double cluster_tol = 1e-6);

struct ConstancySweep {
    double spread = 0.0;  // max pairwise deviation of sorted eigenvalue vectors
    int count = 0;
    int failures = 0;
};

ConstancySweep constancy_sweep(const IsoparametricFamily& fam, double t, int count,
                               std::mt19937_64& rng);

// Travel along the normal great circle to the focal set where f = branch.
// branch is the sign of the target f-value.
Eigen::VectorXd focal_point(const IsoparametricFamily& fam, const Eigen::VectorXd& x, int branch);

// Tangent / in-sphere-normal split of the focal submanifold at p, computed
// from the principal directions of a local projected-neighbor cloud, refined
// by a quadratic fit.
struct FocalFrames {
    Eigen::VectorXd point;
    Eigen::MatrixXd tangent;   // (n+1) x dimW
    Eigen::MatrixXd normal;    // (n+1) x (n-1-dimW+1), normal within T_p S^n
};

FocalFrames focal_frames(const IsoparametricFamily& fam, const Eigen::VectorXd& p,
                         std::mt19937_64& rng);

// Shape operator spectrum of the focal submanifold in normal direction xi,
// from a quadratic least-squares fit of projected neighbors (two radii,
// Richardson-combined).
SpectrumSummary focal_spectrum(const IsoparametricFamily& fam, const Eigen::VectorXd& p,
                               const Eigen::VectorXd& xi, std::mt19937_64& rng,
                               double cluster_tol = 1e-6);
// same, reusing precomputed frames (shared across normal directions)
SpectrumSummary focal_spectrum(const IsoparametricFamily& fam, const FocalFrames& frames,
                               const Eigen::VectorXd& xi, std::mt19937_64& rng,
                               double cluster_tol = 1e-6);

struct AustereCertificate {
    bool pass = false;
    bool conclusive = true;
    double worst_asymmetry = 0.0;  // eigenvalue pairing defect over all spectra
    std::string detail;
};

// PASS iff every spectrum is symmetric under negation with matching
// multiplicities; zero eigenvalues may stay unpaired.
AustereCertificate austere_test(std::span<const SpectrumSummary> spectra, double tol = 1e-6);

// Point U diag(lambda) U^* of the unit sphere of traceless hermitian 3x3
// matrices, identified with S^7 via an orthonormal basis.
Eigen::VectorXd adjoint_orbit_sample(const Eigen::Vector3d& lambda,
                                     const Eigen::Matrix3cd& U);
// the determinant-based degree-3 invariant on that model, |f| = 1 on orbits
// with a repeated eigenvalue pair
double adjoint_orbit_f(const Eigen::VectorXd& x8);
// the identification basis (orthonormal for <A,B> = tr(AB))
const std::vector<Eigen::Matrix3cd>& hermitian_basis();

// text manifest (one JSON object) naming a family and its parameters
std::string family_to_manifest(const IsoparametricFamily& fam);
IsoparametricFamily family_from_manifest(const std::string& manifest);

}  // namespace gv
