#pragma once

#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gv/jet.hpp"
#include "gv/linalg.hpp"

namespace gv {

// Chart metric with jet-evaluable entries and a chart-domain predicate.
struct MetricChart {
    int dim = 0;
    std::function<JetMat(std::span<const Jet2>)> eval;
    std::function<bool(std::span<const double>)> valid = [](std::span<const double>) {
        return true;
    };
};

// rank-3/4 tensors as flat arrays with stride indexing, d <= 8
struct Tensor3 {
    int d = 0;
    std::vector<double> a;
    Tensor3() = default;
    explicit Tensor3(int dim) : d(dim), a(static_cast<size_t>(dim * dim * dim), 0.0) {}
    double& operator()(int i, int j, int k) { return a[static_cast<size_t>((i * d + j) * d + k)]; }
    double operator()(int i, int j, int k) const {
        return a[static_cast<size_t>((i * d + j) * d + k)];
    }
};

struct Tensor4 {
    int d = 0;
    std::vector<double> a;
    Tensor4() = default;
    explicit Tensor4(int dim) : d(dim), a(static_cast<size_t>(dim * dim * dim * dim), 0.0) {}
    double& operator()(int l, int i, int j, int k) {
        return a[static_cast<size_t>(((l * d + i) * d + j) * d + k)];
    }
    double operator()(int l, int i, int j, int k) const {
        return a[static_cast<size_t>(((l * d + i) * d + j) * d + k)];
    }
};

struct CurvatureReport {
    Eigen::VectorXd point;
    Eigen::MatrixXd metric;
    Tensor3 christoffel;  // Gamma^k_{ij}
    Tensor4 riemann;      // R^l_{ijk} = d_i G^l_{jk} - d_j G^l_{ik} + G G - G G
    Eigen::MatrixXd ricci;
    double scalar = 0.0;
    double metric_condition = 0.0;
    bool ill_conditioned = false;  // condition number beyond 1e8
    double ricci_symmetry_residual = 0.0;
};

// Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})
Tensor3 christoffel(const MetricChart& metric, std::span<const double> point);

// Riemann from Gamma and dGamma assembled analytically out of g, dg, ddg;
// Ricci by contraction R_{jk} = R^i_{ijk}; scalar by metric trace.
CurvatureReport curvature_tensors(const MetricChart& metric, std::span<const double> point);

// g-operator norm of the Ricci tensor at a point (largest |eigenvalue| of
// g^{-1} Ric), the residual used by every Ricci-flatness claim.
double ricci_operator_norm(const MetricChart& metric, std::span<const double> point);

using PointSampler = std::function<Eigen::VectorXd(std::mt19937_64&)>;

struct SweepSummary {
    double max_residual = 0.0;
    double mean_residual = 0.0;
    int count = 0;
    int failures = 0;
};

// Randomized Ricci-residual sweep; point-level failures are recorded and the
// sweep continues. Deterministic for a fixed rng state.
SweepSummary ricci_residual_sweep(const MetricChart& metric, const PointSampler& sampler,
                                  int count, std::mt19937_64& rng);

// ---- stock charts used across tests and suites ----

// flat R^n
MetricChart euclidean_chart(int n);
// round S^n of radius 1 in the stereographic chart, g = 4 delta / (1+|x|^2)^2
MetricChart sphere_chart(int n);
// S^2 in polar coordinates (theta, phi)
MetricChart polar_sphere_chart();

}  // namespace gv
