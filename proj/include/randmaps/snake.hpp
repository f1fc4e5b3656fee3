#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "randmaps/errors.hpp"
#include "randmaps/rng.hpp"

namespace randmaps {

// Discretized normalized excursion with Gaussian tree labels on a uniform
// grid t_k = k/m. delta = -min Z, s_star its argmin (smallest index on ties;
// grid ties are a measure-zero discretization artifact).
struct SnakeGrid {
    std::int64_t m = 0;
    std::vector<double> e;  // m+1 values, e[0] = e[m] = 0, interior > 0
    std::vector<double> Z;  // m+1 values, Z[0] = 0
    std::int64_t s_star = 0;
    double delta = 0;          // -min Z over the grid
    // exact minimum of the label field over the interpolated tree (strictly
    // deeper than the grid minimum); filled by the tree-recursion sampler,
    // equal to delta otherwise
    double delta_refined = 0;
    bool refined = false;

    void finalize();
};

enum class ExcursionMethod { Vervaat, DyckContour };

// Brownian bridge + Vervaat rotation at the argmin (default), or the
// cross-check route: rescaled contour of a uniform plane tree with 4m^2
// edges. Interior zeros are rejected and resampled.
std::vector<double> sample_excursion(std::int64_t m, Rng& rng,
                                     ExcursionMethod method = ExcursionMethod::Vervaat);

enum class LabelMethod { Auto, DenseCholesky, TreeRecursion };

// Gaussian labels with conditional covariance min of e over the connecting
// arc: dense factorization for m <= 1024, snake-stack recursion otherwise
// (exact in both cases). `regularized` reports whether the dense route had
// to add 1e-12 to the diagonal.
std::vector<double> sample_labels(const std::vector<double>& e, Rng& rng,
                                  LabelMethod method = LabelMethod::Auto,
                                  bool* regularized = nullptr,
                                  double* refined_min = nullptr);

SnakeGrid sample_snake(std::int64_t m, Rng& rng,
                       ExcursionMethod em = ExcursionMethod::Vervaat,
                       LabelMethod lm = LabelMethod::Auto);

// Couples the m-grid with an internal lattice of m*factor points: the
// exposed e, Z, delta are the plain grid quantities (subsampled), while
// delta_refined carries the label-field minimum of the fine lattice plus
// exact segment minima. Used where the continuum law of delta is the target;
// the plain grid minimum lags it by a visible m^{-1/4} truncation bias.
SnakeGrid sample_snake_refined(std::int64_t m, std::int64_t factor, Rng& rng);

// One-step label pseudo-distance Z_j + Z_k - 2 max(min over [j,k], min over
// the complementary arc). Does not satisfy the triangle inequality.
double dcirc(const SnakeGrid& g, std::int64_t j, std::int64_t k);

// Symmetric (m+1)x(m+1) matrices of dcirc and its metric closure.
struct MetricSample {
    std::int64_t m = 0;
    std::vector<double> dcirc_mat;  // row-major (m+1)^2
    std::vector<double> dstar_mat;

    double dc(std::int64_t j, std::int64_t k) const {
        return dcirc_mat[static_cast<std::size_t>(j * (m + 1) + k)];
    }
    double ds(std::int64_t j, std::int64_t k) const {
        return dstar_mat[static_cast<std::size_t>(j * (m + 1) + k)];
    }
};

// All-pairs chain infimum over grid points (Floyd-Warshall iterated to a
// fixpoint, so the triangle inequality holds exactly on the output floats).
MetricSample dstar_grid(const SnakeGrid& g);

// Single-pair chain infimum via Dijkstra on the complete label graph.
double dstar_pair(const SnakeGrid& g, std::int64_t u, std::int64_t v);

// Discretized simple geodesic from grid index k to s_star: first crossing
// times of the levels Z_k - i*h, h = delta/ceil(delta*sqrt(m)).
std::vector<std::int64_t> simple_geodesic_continuum(const SnakeGrid& g, std::int64_t k);

// CSV dump (t,e,Z) and binary matrix format "RMDM"; see docs/formats.md.
void write_snake_csv(std::ostream& os, const SnakeGrid& g);
void write_metric_binary(std::ostream& os, const MetricSample& ms, bool with_dcirc,
                         bool with_dstar);
MetricSample read_metric_binary(std::istream& is);

}  // namespace randmaps
