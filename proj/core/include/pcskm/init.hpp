#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "pcskm/constraints.hpp"
#include "pcskm/matrix.hpp"

namespace pcskm {

enum class InitMethod { maximin, dkmpp, robin, seeding };

std::string_view to_string(InitMethod m) noexcept;
InitMethod parse_init_method(std::string_view name);

struct InitResult {
    Matrix centroids;  // K x p
    InitMethod method = InitMethod::maximin;
    /// Data-point index for point-sourced centroids, or the neighbourhood's smallest member
    /// index for Seeding means.
    std::vector<std::size_t> provenance;
    /// True where the centroid is a neighbourhood mean rather than a data point.
    std::vector<bool> from_neighborhood;
};

struct RobinOptions {
    std::size_t neighbors = 10;  // mp
    double band = 0.05;          // accepted LOF interval [1 - band, 1 + band]
};

/// Max-norm start, then repeated farthest-point selection.
InitResult maximin_init(const DataMatrix& m, std::size_t k);

/// Density-weighted farthest-point traversal with a Gaussian kernel whose bandwidth is the
/// mean nearest-neighbour distance.
InitResult dkmpp_init(const DataMatrix& m, std::size_t k);

/// Farthest-point traversal that skips candidates whose local outlier factor leaves the band.
InitResult robin_init(const DataMatrix& m, std::size_t k, const RobinOptions& opts = {});

/// Means of the largest MUST-LINK closure neighbourhoods, topped up by farthest points.
InitResult seeded_init(const DataMatrix& m, std::size_t k, const ConstraintSet& constraints);

/// Dispatches on `method`; constraints are only read by Seeding.
InitResult initialize(InitMethod method, const DataMatrix& m, std::size_t k,
                      const ConstraintSet& constraints, const RobinOptions& robin = {});

/// Per-point density score used by dkmpp_init (exposed for tests).
std::vector<double> kernel_density(const DataMatrix& m);

/// Local outlier factor of each point over `neighbors` nearest neighbours (Euclidean).
std::vector<double> local_outlier_factor(const DataMatrix& m, std::size_t neighbors);

/// Connected components of the MUST-LINK graph restricted to points that appear in a
/// MUST-LINK pair; each component is sorted, components ordered by smallest member.
std::vector<std::vector<std::size_t>> must_link_neighborhoods(const ConstraintSet& constraints);

}  // namespace pcskm
