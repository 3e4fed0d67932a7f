#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pcskm/constraints.hpp"
#include "pcskm/dataset.hpp"
#include "pcskm/init.hpp"
#include "pcskm/matrix.hpp"

namespace pcskm {

enum class Algorithm { lkm, skm, pckm, mpckm, pcskm };

std::string_view to_string(Algorithm a) noexcept;
Algorithm parse_algorithm(std::string_view name);
bool is_sparse(Algorithm a) noexcept;

using Assignment = std::vector<int>;

/// Cluster id meaning "not placed yet" in an assignment vector.
inline constexpr int kUnassigned = -1;

struct ClusterModel {
    Matrix centroids;  // K x p
    Assignment assignment;
    std::vector<std::size_t> cluster_sizes;
    double objective = 0.0;
    /// Centroid updates performed (inner Lloyd steps summed over outer iterations).
    int iterations = 0;
    int outer_iterations = 0;
    /// Objective after every Lloyd centroid update (LKM, PCKM, MPCKM) or after every weight
    /// update (SKM, PCSKM).
    std::vector<double> objective_trace;
};

enum class WeightRegime { sparse_l1l2, metric_diagonal, uniform };

struct FeatureWeights {
    std::vector<double> w;
    WeightRegime regime = WeightRegime::uniform;
    std::optional<double> sparsity;
    /// Features whose metric weight hit the cap (MPCKM only).
    std::size_t capped = 0;

    static FeatureWeights uniform(std::size_t p, double value = 1.0);
};

struct FeatureScores {
    std::vector<double> gamma;
    bool penalized = false;
    std::optional<double> delta;
    /// False when the L1 budget could not be met because the leading scores are tied.
    bool sparsity_attained = true;
};

struct ConvergenceConfig {
    double epsilon = 1e-4;
    int max_outer_iterations = 100;
    int max_lloyd_iterations = 300;

    void validate() const;
};

inline constexpr double kMetricWeightCap = 1e6;

// Kernels.

/// Nearest centroid under Sum_j w_j (x_ij - m_kj)^2, ties to the lowest id.
Assignment assign_lloyd(const DataMatrix& m, const Matrix& centroids, std::span<const double> w);

/// Constrained assignment, one ascending sweep. Partners with a lower index use their new
/// cluster from this sweep, higher ones their `current` cluster (skipped when unassigned).
/// ML violations cost cost * Sum_j w_j f_j, CL violations cost * Sum_j w_j fbar_j.
Assignment assign_pckm(const DataMatrix& m, const Matrix& centroids, const ConstraintSet& constraints,
                       const Assignment& current, std::span<const double> w,
                       const MaxSeparatedPair& pair);

/// Cluster means of `assignment`. Empty clusters are refilled one at a time (ascending id)
/// with the point farthest from its own centroid under `w`, taken from a cluster of size > 1;
/// `assignment` is updated to match.
Matrix update_centroids(const DataMatrix& m, Assignment& assignment, std::size_t k,
                        std::span<const double> w);

std::vector<std::size_t> cluster_sizes(const Assignment& assignment, std::size_t k);

std::vector<double> ml_penalty(std::span<const double> a, std::span<const double> b);
std::vector<double> cl_penalty(std::span<const double> a, std::span<const double> b,
                               const MaxSeparatedPair& pair);

/// Per-feature BCSS: TSS_j - WCSS_j.
FeatureScores per_feature_bcss(const DataMatrix& m, const Assignment& assignment,
                               const Matrix& centroids);

/// BCSS minus the per-feature penalties of constraints violated by `assignment`.
FeatureScores per_feature_penalized_bcss(const DataMatrix& m, const Assignment& assignment,
                                         const Matrix& centroids, const ConstraintSet& constraints,
                                         const MaxSeparatedPair& pair);

/// Soft-thresholded, L2-normalised weights meeting ||w||_1 <= s. Sets scores.delta and
/// scores.sparsity_attained. Throws NumericalError when no score is positive.
FeatureWeights update_weights(FeatureScores& scores, double s);

/// Normalised soft-threshold of the positive scores at `delta` (zero vector if none survive).
std::vector<double> soft_threshold_weights(std::span<const double> gamma, double delta);

// Engines. All are deterministic functions of their arguments.

ClusterModel run_lkm(const DataMatrix& m, const InitResult& init, const ConvergenceConfig& cfg = {});

ClusterModel run_pckm(const DataMatrix& m, const InitResult& init, const ConstraintSet& constraints,
                      const ConvergenceConfig& cfg = {});

struct WeightedModel {
    ClusterModel model;
    FeatureWeights weights;
};

WeightedModel run_mpckm(const DataMatrix& m, const InitResult& init, const ConstraintSet& constraints,
                        const ConvergenceConfig& cfg = {});

WeightedModel run_skm(const DataMatrix& m, const InitResult& init, double s,
                      const ConvergenceConfig& cfg = {});

WeightedModel run_pcskm(const DataMatrix& m, const InitResult& init, double s,
                        const ConstraintSet& constraints, const ConvergenceConfig& cfg = {});

/// Runs any algorithm; `s` is ignored by the non-sparse ones.
WeightedModel run_algorithm(Algorithm algorithm, const DataMatrix& m, const InitResult& init,
                            const ConstraintSet& constraints, double s, const ConvergenceConfig& cfg = {});

/// Recomputes the named objective from scratch: K-Means SSE (LKM), weighted BCSS (SKM),
/// penalised SSE (PCKM), metric objective with log normaliser (MPCKM), penalised weighted
/// BCSS (PCSKM).
double objective_value(const DataMatrix& m, const ClusterModel& model, const FeatureWeights& weights,
                       const ConstraintSet& constraints, Algorithm algorithm);

/// Number of constraints broken by `assignment`.
std::size_t count_violations(const ConstraintSet& constraints, const Assignment& assignment);

}  // namespace pcskm
