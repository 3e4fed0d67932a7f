#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pcskm/matrix.hpp"

namespace pcskm {

enum class FeatureQuality { informative, uninformative, unknown };

std::string_view to_string(FeatureQuality q) noexcept;

struct LabeledDataset {
    explicit LabeledDataset(DataMatrix m) : matrix(std::move(m)) {}

    DataMatrix matrix;
    /// Contiguous class ids 0..class_count-1, one per row.
    std::optional<std::vector<int>> labels;
    int class_count = 0;
    std::optional<std::vector<FeatureQuality>> feature_truth;
    std::vector<std::string> feature_names;
    /// Original label strings, indexed by class id.
    std::vector<std::string> class_names;

    /// Throws DataError when labels or feature_truth disagree with the matrix shape.
    void validate() const;
};

/// Reads a headered CSV. Class ids are assigned in order of first appearance.
LabeledDataset load_csv(const std::filesystem::path& path,
                        const std::optional<std::string>& label_column = std::nullopt);

/// Writes the dataset using the same schema load_csv accepts ("class" label column when labeled).
void write_csv(const LabeledDataset& ds, const std::filesystem::path& path);

std::vector<double> global_centroid(const DataMatrix& m);

/// Column-wise z-scoring; constant columns are centered only.
DataMatrix standardize(const DataMatrix& m);

struct MaxSeparatedPair {
    std::size_t first = 0;
    std::size_t second = 0;
    std::vector<double> per_feature_gap;
};

/// Exhaustive O(n^2) scan; ties go to the lexicographically smallest (i, j).
MaxSeparatedPair max_separated_pair(const DataMatrix& m);

struct BrodinovaParams {
    int clusters = 3;
    int per_cluster = 40;
    int informative = 5;
    int uninformative = 5;
    /// Distance in standard deviations between neighbouring cluster means on every informative axis.
    double separation = 6.0;
};

LabeledDataset generate_brodinova(const BrodinovaParams& params, std::uint64_t seed);

/// Appends `count` i.i.d. exponential(rate) columns flagged uninformative.
LabeledDataset contaminate_exponential(const LabeledDataset& ds, int count, double rate,
                                       std::uint64_t seed);

/// Draws `per_class` rows of each listed class without replacement; row order is preserved
/// and labels are remapped to positions in `classes`.
LabeledDataset subsample_classes(const LabeledDataset& ds, const std::vector<int>& classes,
                                 int per_class, std::uint64_t seed);

}  // namespace pcskm
