#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gv {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Deterministic substream: one master seed fans out per label, so adding a
// check never reshuffles another check's samples.
inline std::mt19937_64 substream(std::uint64_t seed, const std::string& label) {
    return std::mt19937_64(splitmix64(seed ^ fnv1a(label)));
}

inline Eigen::VectorXd random_unit_vector(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(dim);
    double n2 = 0.0;
    do {
        for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
        n2 = v.squaredNorm();
    } while (n2 < 1e-12);
    return v / std::sqrt(n2);
}

inline Eigen::VectorXd random_in_box(std::mt19937_64& rng, const Eigen::VectorXd& lo,
                                     const Eigen::VectorXd& hi) {
    Eigen::VectorXd v(lo.size());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < lo.size(); ++i) v[i] = lo[i] + (hi[i] - lo[i]) * unif(rng);
    return v;
}

// Halton low-discrepancy sequence, used for fixed reproducible panels.
inline double halton(std::uint64_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

inline Eigen::VectorXd halton_point(std::uint64_t index, const Eigen::VectorXd& lo,
                                    const Eigen::VectorXd& hi) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    Eigen::VectorXd v(lo.size());
    for (int i = 0; i < lo.size(); ++i)
        v[i] = lo[i] + (hi[i] - lo[i]) * halton(index + 1, primes[i]);
    return v;
}

}  // namespace gv
