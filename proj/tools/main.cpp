#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pcskm/error.hpp"
#include "runner.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kData = 2, kNumerical = 3 };

void add_run_flags(CLI::App* cmd, pcskm::cli::RunOptions& o, std::string& config, std::string& out,
                   std::uint64_t& seed, unsigned& threads) {
    cmd->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "Output directory (overrides the config)");
    cmd->add_option("--seed", seed, "Master seed (overrides the config)");
    cmd->add_option("--threads", threads, "Worker threads (0 = hardware)");
    cmd->add_flag("--force", o.force, "Write into a non-empty output directory");
    cmd->add_flag("--progress", o.progress, "Report task completion on stderr");
    cmd->add_flag("--standardize", o.standardize, "Z-score every feature before clustering");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pairwise constrained sparse K-Means benchmark runner"};
    app.set_version_flag("--version", pcskm::cli::kVersion);
    app.require_subcommand(1);

    pcskm::cli::RunOptions run_opts;
    std::string config, out;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    auto* run = app.add_subcommand("run", "Cross-validated experiment grid");
    add_run_flags(run, run_opts, config, out, seed, threads);
    auto* weights = app.add_subcommand("weights", "Feature-weight profiles for SKM, PCSKM and MPCKM");
    add_run_flags(weights, run_opts, config, out, seed, threads);

    pcskm::cli::GenerateOptions gen;
    std::string gen_out, input, label;
    auto* generate = app.add_subcommand("generate", "Write a synthetic or derived dataset");
    generate->add_option("kind", gen.kind, "brodinova | contaminate | subsample")
        ->required()
        ->check(CLI::IsMember({"brodinova", "contaminate", "subsample"}));
    generate->add_option("--out", gen_out, "Output CSV path")->required();
    generate->add_option("--seed", gen.seed, "Generator seed");
    generate->add_flag("--force", gen.force, "Overwrite existing files");
    generate->add_option("--clusters", gen.brodinova.clusters, "brodinova: cluster count");
    generate->add_option("--per-cluster", gen.brodinova.per_cluster, "brodinova: points per cluster");
    generate->add_option("--informative", gen.brodinova.informative, "brodinova: informative features");
    generate->add_option("--uninformative", gen.brodinova.uninformative, "brodinova: noise features");
    generate->add_option("--separation", gen.brodinova.separation, "brodinova: mean spacing in sd units");
    generate->add_option("--input", input, "contaminate/subsample: source CSV")->check(CLI::ExistingFile);
    generate->add_option("--label-column", label, "contaminate/subsample: label column of --input");
    generate->add_option("--count", gen.count, "contaminate: appended columns");
    generate->add_option("--rate", gen.rate, "contaminate: exponential rate");
    generate->add_option("--classes", gen.classes, "subsample: class ids to keep")->delimiter(',');
    generate->add_option("--per-class", gen.per_class, "subsample: rows per class");

    std::vector<std::uint64_t> points{150, 351, 424, 406, 120};
    int folds = 10;
    auto* audit = app.add_subcommand("audit-table1", "Constraint pool sizes implied by k-fold CV");
    audit->add_option("--points", points, "Dataset sizes")->delimiter(',');
    audit->add_option("--folds", folds, "Fold count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*run || *weights) {
            auto* used = *run ? run : weights;
            run_opts.config = config;
            if (!out.empty()) run_opts.out = out;
            if (used->count("--seed") > 0) run_opts.seed = seed;
            if (used->count("--threads") > 0) run_opts.threads = threads;
            if (*run) {
                pcskm::cli::cmd_run(run_opts);
            } else {
                pcskm::cli::cmd_weights(run_opts);
            }
        } else if (*generate) {
            gen.out = gen_out;
            if (!input.empty()) gen.input = input;
            if (!label.empty()) gen.label_column = label;
            pcskm::cli::cmd_generate(gen);
        } else if (*audit) {
            pcskm::cli::cmd_audit_table1(points, folds, std::cout);
        }
    } catch (const pcskm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const pcskm::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const pcskm::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
