#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pcskm/evaluation.hpp"

namespace pcskm::cli {

inline constexpr const char* kVersion = "1.0.0";

struct GeneratorSpec {
    std::string kind = "brodinova";
    BrodinovaParams brodinova;
    std::uint64_t seed = 1;
};

struct ContaminateSpec {
    int count = 4;
    double rate = 1.0;
    std::uint64_t seed = 1;
};

struct SubsampleSpec {
    std::vector<int> classes;
    int per_class = 50;
    /// Independent draws; results are reported per subset and averaged in the summary.
    int subsets = 1;
    std::uint64_t seed = 1;
};

struct DatasetSpec {
    std::string name;
    std::optional<std::filesystem::path> path;
    std::optional<std::string> label_column;
    std::optional<GeneratorSpec> generator;
    std::optional<ContaminateSpec> contaminate;
    std::optional<SubsampleSpec> subsample;
};

struct ExperimentConfig {
    DatasetSpec dataset;
    std::vector<Algorithm> algorithms;
    std::vector<InitMethod> inits;
    std::vector<KindFilter> kinds;
    std::vector<double> fractions;
    int runs = 25;
    int folds = 10;
    std::uint64_t master_seed = 1;
    std::optional<std::vector<double>> sparsity_grid;
    bool standardize = false;
    unsigned threads = 0;  // 0: one per hardware thread
    RobinOptions robin;
    ConvergenceConfig convergence;
    std::optional<std::filesystem::path> output;
};

/// Parses and validates a JSON config. Errors name the offending field path.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});

struct RunOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    bool force = false;
    bool progress = false;
    bool standardize = false;
    std::optional<unsigned> threads;
};

/// Full grid; writes results.csv, summary.json and manifest.json into the output directory.
void cmd_run(const RunOptions& opts);

/// Feature-weight profiles; writes weights.csv and manifest.json.
void cmd_weights(const RunOptions& opts);

struct GenerateOptions {
    std::string kind;  // brodinova | contaminate | subsample
    std::filesystem::path out;
    std::uint64_t seed = 1;
    bool force = false;
    BrodinovaParams brodinova;
    std::optional<std::filesystem::path> input;
    std::optional<std::string> label_column;
    int count = 4;
    double rate = 1.0;
    std::vector<int> classes;
    int per_class = 50;
};

/// Writes the CSV and a `<out>.meta.json` sidecar.
void cmd_generate(const GenerateOptions& opts);

/// Prints points, CV training labels, pool size and the 1% / 10% sample sizes per point count.
void cmd_audit_table1(const std::vector<std::uint64_t>& points, int folds, std::ostream& out);

/// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace pcskm::cli
