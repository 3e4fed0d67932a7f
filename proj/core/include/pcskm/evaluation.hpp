#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcskm/constraints.hpp"
#include "pcskm/dataset.hpp"
#include "pcskm/engines.hpp"
#include "pcskm/init.hpp"

namespace pcskm {

struct FoldPlan {
    std::vector<int> fold_of;  // fold id per point
    int folds = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] std::vector<std::size_t> test_indices(int fold) const;
    [[nodiscard]] std::vector<std::size_t> train_indices(int fold) const;
};

/// Shuffled round-robin partition; fold sizes differ by at most one.
FoldPlan make_folds(std::size_t n, int folds, std::uint64_t seed);

/// Pair-counting F-measure over unordered pairs of test points.
double pairwise_f_score(std::span<const int> assignment, std::span<const int> labels,
                        std::span<const std::size_t> test_idx);

/// {1.1, 1.3, ...} up to sqrt(p); {sqrt(p)} when sqrt(p) < 1.1.
std::vector<double> sparsity_grid(std::size_t p);

struct SparsityChoice {
    double s = 0.0;
    double f_score = 0.0;
    WeightedModel result;
    /// Final weights averaged over every grid value.
    std::vector<double> mean_weights;
};

/// Evaluates every grid value and keeps the best F on the test pairs (ties to the smaller s).
SparsityChoice sweep_sparsity(const DataMatrix& m, std::span<const int> labels,
                              std::span<const std::size_t> test_idx, Algorithm algorithm,
                              const InitResult& init, const ConstraintSet& constraints,
                              const ConvergenceConfig& cfg, std::span<const double> grid);

struct WilcoxonResult {
    double w_plus = 0.0;
    double w_minus = 0.0;
    std::size_t n_effective = 0;
    double p_value = 1.0;
    bool exact = true;
};

inline constexpr std::size_t kWilcoxonExactLimit = 12;

/// Two-sided paired signed-rank test; zero differences dropped, average ranks for ties.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// floor(mean over folds of C(training size, 2)).
std::uint64_t table1_pool_size(std::uint64_t n, std::uint64_t folds);

/// round(mean training-set size) under the same fold rule.
std::uint64_t table1_training_labels(std::uint64_t n, std::uint64_t folds);

struct CvCell {
    Algorithm algorithm = Algorithm::lkm;
    InitMethod init = InitMethod::dkmpp;
    KindFilter kind = KindFilter::both;
    double fraction = 0.0;
    int run = 0;
    int fold = 0;
    double f_score = 0.0;
    std::optional<double> chosen_s;
    std::size_t constraint_count = 0;
    std::uint64_t seed = 0;  // constraint-sample seed
    std::vector<double> weights;  // final weights (empty for LKM/PCKM)
};

struct CellStats {
    Algorithm algorithm = Algorithm::lkm;
    InitMethod init = InitMethod::dkmpp;
    KindFilter kind = KindFilter::both;
    double fraction = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation
    std::size_t count = 0;
};

struct PerformanceCurve {
    std::vector<CvCell> cells;  // canonical order: run, fold, fraction, kind, init, algorithm

    [[nodiscard]] std::vector<CellStats> aggregate() const;
};

struct CvOptions {
    std::vector<Algorithm> algorithms;
    std::vector<InitMethod> inits;
    std::vector<KindFilter> kinds;
    std::vector<double> fractions;
    int runs = 25;
    int folds = 10;
    std::uint64_t master_seed = 0;
    ConvergenceConfig convergence;
    RobinOptions robin;
    /// Overrides sparsity_grid(p) when set.
    std::optional<std::vector<double>> grid;
    /// Keep per-s weights averaged over the grid in CvCell::weights instead of the chosen s.
    bool average_weights_over_grid = false;
    unsigned threads = 1;
    std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Seed of the fold plan for `run`.
std::uint64_t fold_seed(std::uint64_t master, int run);

/// Seed of the constraint sample for (run, fold, fraction).
std::uint64_t constraint_seed(std::uint64_t master, int run, int fold, double fraction);

/// Cross-validated grid: per run a fresh fold plan, per fold a pool from the training labels,
/// per fraction a fresh sample; clustering always covers the whole dataset and scoring only
/// test-test pairs. K is the class count.
PerformanceCurve run_cv_experiment(const LabeledDataset& ds, const CvOptions& opts);

}  // namespace pcskm
