#include "runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "pcskm/error.hpp"
#include "pcskm/random.hpp"

namespace pcskm::cli {
namespace {

using json = nlohmann::ordered_json;

// Walks a JSON document while tracking the field path for error messages.
class Field {
public:
    Field(const json& value, std::string path) : v_(value), path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const { return path_; }
    [[nodiscard]] const json& raw() const { return v_; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError((path_.empty() ? std::string("config") : path_) + ": " + what);
    }

    void require_object(std::initializer_list<const char*> allowed) const {
        if (!v_.is_object()) fail("expected an object");
        for (const auto& [key, _] : v_.items()) {
            if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
                Field(v_[key], child_path(key)).fail("unknown field");
            }
        }
    }

    [[nodiscard]] bool has(const char* key) const { return v_.contains(key) && !v_[key].is_null(); }

    [[nodiscard]] Field at(const char* key) const {
        if (!has(key)) Field(json(), child_path(key)).fail("missing required field");
        return {v_[key], child_path(key)};
    }

    [[nodiscard]] std::vector<Field> elements() const {
        if (!v_.is_array()) fail("expected an array");
        std::vector<Field> out;
        for (std::size_t i = 0; i < v_.size(); ++i) out.emplace_back(v_[i], path_ + "[" + std::to_string(i) + "]");
        return out;
    }

    [[nodiscard]] std::string str() const {
        if (!v_.is_string()) fail("expected a string");
        return v_.get<std::string>();
    }

    [[nodiscard]] double number() const {
        if (!v_.is_number()) fail("expected a number");
        return v_.get<double>();
    }

    [[nodiscard]] std::int64_t integer(std::int64_t lo, std::int64_t hi) const {
        if (!v_.is_number_integer()) fail("expected an integer");
        const auto x = v_.get<std::int64_t>();
        if (x < lo || x > hi) fail("must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return x;
    }

    [[nodiscard]] std::uint64_t seed() const {
        if (!v_.is_number_unsigned() && !(v_.is_number_integer() && v_.get<std::int64_t>() >= 0)) {
            fail("expected a non-negative integer seed");
        }
        return v_.get<std::uint64_t>();
    }

    [[nodiscard]] bool boolean() const {
        if (!v_.is_boolean()) fail("expected true or false");
        return v_.get<bool>();
    }

private:
    [[nodiscard]] std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& v_;
    std::string path_;
};

template <class T, class Parse>
std::vector<T> parse_list(const Field& f, Parse parse) {
    std::vector<T> out;
    for (const auto& e : f.elements()) {
        try {
            out.push_back(parse(e.str()));
        } catch (const ConfigError& err) {
            e.fail(err.what());
        }
        if (std::count(out.begin(), out.end(), out.back()) > 1) e.fail("duplicate entry");
    }
    if (out.empty()) f.fail("must not be empty");
    return out;
}

constexpr int kIntMax = 1 << 30;

BrodinovaParams parse_brodinova(const Field& g) {
    BrodinovaParams b;
    if (g.has("clusters")) b.clusters = static_cast<int>(g.at("clusters").integer(2, kIntMax));
    if (g.has("per_cluster")) b.per_cluster = static_cast<int>(g.at("per_cluster").integer(1, kIntMax));
    if (g.has("informative")) b.informative = static_cast<int>(g.at("informative").integer(1, kIntMax));
    if (g.has("uninformative")) b.uninformative = static_cast<int>(g.at("uninformative").integer(0, kIntMax));
    if (g.has("separation")) {
        b.separation = g.at("separation").number();
        if (!(b.separation > 0.0)) g.at("separation").fail("must be positive");
    }
    return b;
}

DatasetSpec parse_dataset(const Field& d, const std::filesystem::path& base_dir) {
    d.require_object({"name", "path", "label_column", "generator", "contaminate", "subsample"});
    DatasetSpec spec;
    if (d.has("path") == d.has("generator")) d.fail("give exactly one of 'path' or 'generator'");
    if (d.has("path")) {
        std::filesystem::path p = d.at("path").str();
        spec.path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
        spec.name = p.stem().string();
    }
    if (d.has("label_column")) spec.label_column = d.at("label_column").str();
    if (d.has("generator")) {
        const auto g = d.at("generator");
        g.require_object({"kind", "clusters", "per_cluster", "informative", "uninformative", "separation", "seed"});
        GeneratorSpec gen;
        gen.kind = g.at("kind").str();
        if (gen.kind != "brodinova") g.at("kind").fail("unknown generator '" + gen.kind + "' (expected brodinova)");
        gen.brodinova = parse_brodinova(g);
        if (g.has("seed")) gen.seed = g.at("seed").seed();
        spec.generator = gen;
        spec.name = "brodinova_" + std::to_string(gen.brodinova.informative) + "+" +
                    std::to_string(gen.brodinova.uninformative);
    }
    if (d.has("contaminate")) {
        const auto c = d.at("contaminate");
        c.require_object({"count", "rate", "seed"});
        ContaminateSpec cs;
        if (c.has("count")) cs.count = static_cast<int>(c.at("count").integer(1, kIntMax));
        if (c.has("rate")) {
            cs.rate = c.at("rate").number();
            if (!(cs.rate > 0.0)) c.at("rate").fail("must be positive");
        }
        if (c.has("seed")) cs.seed = c.at("seed").seed();
        spec.contaminate = cs;
    }
    if (d.has("subsample")) {
        const auto s = d.at("subsample");
        s.require_object({"classes", "per_class", "subsets", "seed"});
        SubsampleSpec ss;
        for (const auto& e : s.at("classes").elements()) ss.classes.push_back(static_cast<int>(e.integer(0, kIntMax)));
        if (ss.classes.empty()) s.at("classes").fail("must not be empty");
        if (s.has("per_class")) ss.per_class = static_cast<int>(s.at("per_class").integer(1, kIntMax));
        if (s.has("subsets")) ss.subsets = static_cast<int>(s.at("subsets").integer(1, 10000));
        if (s.has("seed")) ss.seed = s.at("seed").seed();
        spec.subsample = ss;
    }
    if (d.has("name")) spec.name = d.at("name").str();
    return spec;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void prepare_output(const std::filesystem::path& dir, bool force) {
    namespace fs = std::filesystem;
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir)) throw ConfigError("output path " + dir.string() + " is not a directory");
        if (!fs::is_empty(dir) && !force) {
            throw ConfigError("output directory " + dir.string() + " is not empty (use --force to overwrite)");
        }
    }
    fs::create_directories(dir);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("write failed for " + path.string());
}

struct Subset {
    std::string name;
    LabeledDataset data;
};

LabeledDataset base_dataset(const DatasetSpec& spec) {
    if (spec.path) return load_csv(*spec.path, spec.label_column);
    return generate_brodinova(spec.generator->brodinova, spec.generator->seed);
}

// Every dataset the experiment covers: one, or one per subsample draw.
std::vector<Subset> materialize(const ExperimentConfig& cfg) {
    const auto base = base_dataset(cfg.dataset);
    const int subsets = cfg.dataset.subsample ? cfg.dataset.subsample->subsets : 1;
    std::vector<Subset> out;
    for (int s = 0; s < subsets; ++s) {
        LabeledDataset ds = base;
        if (cfg.dataset.subsample) {
            const auto& ss = *cfg.dataset.subsample;
            ds = subsample_classes(ds, ss.classes, ss.per_class,
                                   subsets == 1 ? ss.seed : derive_seed(ss.seed, {static_cast<std::uint64_t>(s)}));
        }
        if (cfg.dataset.contaminate) {
            const auto& c = *cfg.dataset.contaminate;
            ds = contaminate_exponential(ds, c.count, c.rate,
                                         subsets == 1 ? c.seed : derive_seed(c.seed, {static_cast<std::uint64_t>(s)}));
        }
        if (cfg.standardize) ds.matrix = standardize(ds.matrix);
        if (!ds.labels) throw DataError("dataset '" + cfg.dataset.name + "' has no labels (set dataset.label_column)");
        out.push_back({subsets == 1 ? cfg.dataset.name : cfg.dataset.name + "#" + std::to_string(s), std::move(ds)});
    }
    return out;
}

struct Prepared {
    ExperimentConfig cfg;
    json config_echo;
    std::filesystem::path out;
    unsigned threads = 1;
};

Prepared prepare(const RunOptions& opts) {
    Prepared p;
    p.cfg = parse_config(opts.config);
    std::ifstream in(opts.config);
    p.config_echo = json::parse(in);
    if (opts.seed) p.cfg.master_seed = *opts.seed;
    if (opts.standardize) p.cfg.standardize = true;
    if (opts.threads) p.cfg.threads = *opts.threads;
    if (opts.out) {
        p.out = *opts.out;
    } else if (p.cfg.output) {
        p.out = *p.cfg.output;
    } else {
        throw ConfigError("no output directory: pass --out or set 'output' in the config");
    }
    p.threads = p.cfg.threads != 0 ? p.cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    return p;
}

CvOptions cv_options(const Prepared& p, const std::vector<Algorithm>& algorithms, bool progress,
                     const std::string& label) {
    CvOptions o;
    o.algorithms = algorithms;
    o.inits = p.cfg.inits;
    o.kinds = p.cfg.kinds;
    o.fractions = p.cfg.fractions;
    o.runs = p.cfg.runs;
    o.folds = p.cfg.folds;
    o.master_seed = p.cfg.master_seed;
    o.convergence = p.cfg.convergence;
    o.robin = p.cfg.robin;
    o.grid = p.cfg.sparsity_grid;
    o.threads = p.threads;
    if (progress) {
        o.progress = [label](std::size_t done, std::size_t total) {
            std::cerr << "[" << label << "] " << done << "/" << total << " run-fold tasks\n";
        };
    }
    return o;
}

json manifest(const Prepared& p, const std::string& command, const std::vector<Subset>& data) {
    json m;
    m["tool"] = "pcskm";
    m["version"] = kVersion;
    m["command"] = command;
    m["timestamp"] = iso_timestamp();
    m["config"] = p.config_echo;
    json eff;
    eff["master_seed"] = p.cfg.master_seed;
    eff["standardize"] = p.cfg.standardize;
    eff["runs"] = p.cfg.runs;
    eff["folds"] = p.cfg.folds;
    eff["threads"] = p.threads;
    m["effective"] = eff;
    json ds = json::array();
    for (const auto& s : data) {
        ds.push_back({{"name", s.name},
                      {"n", s.data.matrix.n()},
                      {"p", s.data.matrix.p()},
                      {"class_count", s.data.class_count},
                      {"sparsity_grid", p.cfg.sparsity_grid ? *p.cfg.sparsity_grid : sparsity_grid(s.data.matrix.p())}});
    }
    m["datasets"] = ds;
    json seeds;
    seeds["master_seed"] = p.cfg.master_seed;
    json fold = json::array();
    for (int r = 0; r < p.cfg.runs; ++r) fold.push_back(fold_seed(p.cfg.master_seed, r));
    seeds["fold_seeds"] = fold;
    seeds["fold_seed_rule"] = "derive_seed(master_seed, [0x466f6c64, run])";
    seeds["constraint_seed_rule"] = "derive_seed(master_seed, [0x436f6e73, run, fold, round(fraction * 1e6)])";
    seeds["derive_seed"] = "s = splitmix64(master); for each tag: s = splitmix64(s ^ tag)";
    m["seeds"] = seeds;
    m["init_hyperparameters"] = {
        {"maximin", {{"start", "max-norm point"}}},
        {"dkmpp", {{"kernel", "gaussian"}, {"bandwidth", "mean nearest-neighbour distance"}}},
        {"robin", {{"neighbors", p.cfg.robin.neighbors}, {"band", p.cfg.robin.band}, {"reference", "max-norm point"}}},
        {"seeding", {{"shortfall", "maximin fill from neighbourhood means"}}}};
    m["convergence"] = {{"epsilon", p.cfg.convergence.epsilon},
                        {"max_outer_iterations", p.cfg.convergence.max_outer_iterations},
                        {"max_lloyd_iterations", p.cfg.convergence.max_lloyd_iterations},
                        {"metric_weight_cap", kMetricWeightCap}};
    return m;
}

using CellKey = std::tuple<Algorithm, InitMethod, KindFilter, double>;

struct CellAccumulator {
    std::vector<double> subset_means;
    std::vector<double> values;
};

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

json summary(const ExperimentConfig& cfg, const std::vector<Subset>& data, const std::vector<PerformanceCurve>& curves) {
    // Cell statistics: mean of per-subset means, spread over every F-score.
    std::vector<CellKey> order;
    std::map<CellKey, CellAccumulator> cells;
    for (const auto& curve : curves) {
        for (const auto& st : curve.aggregate()) {
            const CellKey key{st.algorithm, st.init, st.kind, st.fraction};
            auto [it, inserted] = cells.try_emplace(key);
            if (inserted) order.push_back(key);
            it->second.subset_means.push_back(st.mean);
        }
        for (const auto& c : curve.cells) cells[{c.algorithm, c.init, c.kind, c.fraction}].values.push_back(c.f_score);
    }

    json s;
    json names = json::array();
    for (const auto& d : data) names.push_back(d.name);
    s["datasets"] = names;
    json cell_list = json::array();
    for (const auto& key : order) {
        const auto& acc = cells[key];
        cell_list.push_back({{"algorithm", to_string(std::get<0>(key))},
                             {"init", to_string(std::get<1>(key))},
                             {"constraint_kind", to_string(std::get<2>(key))},
                             {"fraction", std::get<3>(key)},
                             {"count", acc.values.size()},
                             {"mean_f", mean(acc.subset_means)},
                             {"stddev_f", stddev(acc.values)}});
    }
    s["cells"] = cell_list;

    // PCSKM against every other algorithm; one case per (init, kind), averaged over fractions.
    json comparisons = json::array();
    const bool has_pcskm = std::count(cfg.algorithms.begin(), cfg.algorithms.end(), Algorithm::pcskm) > 0;
    if (has_pcskm) {
        auto case_value = [&](Algorithm a, InitMethod i, KindFilter k) {
            std::vector<double> v;
            for (double f : cfg.fractions) v.push_back(mean(cells[{a, i, k, f}].subset_means));
            return mean(v);
        };
        for (auto other : cfg.algorithms) {
            if (other == Algorithm::pcskm) continue;
            std::vector<double> a;
            std::vector<double> b;
            json cases = json::array();
            for (auto init : cfg.inits) {
                for (auto kind : cfg.kinds) {
                    a.push_back(case_value(Algorithm::pcskm, init, kind));
                    b.push_back(case_value(other, init, kind));
                    cases.push_back({{"init", to_string(init)},
                                     {"constraint_kind", to_string(kind)},
                                     {"pcskm_mean_f", a.back()},
                                     {"other_mean_f", b.back()}});
                }
            }
            const auto w = wilcoxon_signed_rank(a, b);
            comparisons.push_back({{"pair", "PCSKM vs " + std::string(to_string(other))},
                                   {"cases", cases},
                                   {"w_plus", w.w_plus},
                                   {"w_minus", w.w_minus},
                                   {"n_effective", w.n_effective},
                                   {"p_value", w.p_value},
                                   {"exact", w.exact}});
        }
    }
    s["wilcoxon"] = comparisons;
    return s;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    const Field root(doc, "");
    root.require_object({"dataset", "algorithms", "inits", "constraint_kinds", "fractions", "runs", "folds",
                         "master_seed", "sparsity_grid", "standardize", "threads", "robin", "convergence", "output"});
    ExperimentConfig cfg;
    cfg.dataset = parse_dataset(root.at("dataset"), base_dir);
    cfg.algorithms = parse_list<Algorithm>(root.at("algorithms"), parse_algorithm);
    cfg.inits = parse_list<InitMethod>(root.at("inits"), parse_init_method);
    cfg.kinds = root.has("constraint_kinds") ? parse_list<KindFilter>(root.at("constraint_kinds"), parse_kind_filter)
                                             : std::vector<KindFilter>{KindFilter::both};
    for (const auto& e : root.at("fractions").elements()) {
        const double f = e.number();
        if (!(f > 0.0 && f <= 1.0)) e.fail("fraction must lie in (0, 1]");
        if (std::count(cfg.fractions.begin(), cfg.fractions.end(), f) > 0) e.fail("duplicate entry");
        cfg.fractions.push_back(f);
    }
    if (cfg.fractions.empty()) root.at("fractions").fail("must not be empty");
    if (root.has("runs")) cfg.runs = static_cast<int>(root.at("runs").integer(1, 100000));
    if (root.has("folds")) cfg.folds = static_cast<int>(root.at("folds").integer(2, 100000));
    if (root.has("master_seed")) cfg.master_seed = root.at("master_seed").seed();
    if (root.has("sparsity_grid")) {
        std::vector<double> grid;
        for (const auto& e : root.at("sparsity_grid").elements()) {
            const double s = e.number();
            if (!(s >= 1.0)) e.fail("sparsity must be >= 1");
            grid.push_back(s);
        }
        if (grid.empty()) root.at("sparsity_grid").fail("must not be empty");
        cfg.sparsity_grid = grid;
    }
    if (root.has("standardize")) cfg.standardize = root.at("standardize").boolean();
    if (root.has("threads")) cfg.threads = static_cast<unsigned>(root.at("threads").integer(0, 4096));
    if (root.has("robin")) {
        const auto r = root.at("robin");
        r.require_object({"neighbors", "band"});
        if (r.has("neighbors")) cfg.robin.neighbors = static_cast<std::size_t>(r.at("neighbors").integer(1, kIntMax));
        if (r.has("band")) {
            cfg.robin.band = r.at("band").number();
            if (!(cfg.robin.band >= 0.0)) r.at("band").fail("must be >= 0");
        }
    }
    if (root.has("convergence")) {
        const auto c = root.at("convergence");
        c.require_object({"epsilon", "max_outer_iterations", "max_lloyd_iterations"});
        if (c.has("epsilon")) {
            cfg.convergence.epsilon = c.at("epsilon").number();
            if (!(cfg.convergence.epsilon > 0.0)) c.at("epsilon").fail("must be positive");
        }
        if (c.has("max_outer_iterations"))
            cfg.convergence.max_outer_iterations = static_cast<int>(c.at("max_outer_iterations").integer(1, kIntMax));
        if (c.has("max_lloyd_iterations"))
            cfg.convergence.max_lloyd_iterations = static_cast<int>(c.at("max_lloyd_iterations").integer(1, kIntMax));
    }
    if (root.has("output")) {
        std::filesystem::path o = root.at("output").str();
        cfg.output = o.is_absolute() || base_dir.empty() ? o : base_dir / o;
    }
    return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.parent_path());
}

void cmd_run(const RunOptions& opts) {
    const auto p = prepare(opts);
    const auto data = materialize(p.cfg);
    prepare_output(p.out, opts.force);

    std::vector<PerformanceCurve> curves;
    std::ostringstream csv;
    csv << "dataset,algorithm,init,constraint_kind,fraction,run,fold,f_score,chosen_s,seed\n";
    for (const auto& d : data) {
        curves.push_back(run_cv_experiment(d.data, cv_options(p, p.cfg.algorithms, opts.progress, d.name)));
        for (const auto& c : curves.back().cells) {
            csv << d.name << ',' << to_string(c.algorithm) << ',' << to_string(c.init) << ',' << to_string(c.kind)
                << ',' << format_number(c.fraction) << ',' << c.run << ',' << c.fold << ','
                << format_number(c.f_score) << ',' << (c.chosen_s ? format_number(*c.chosen_s) : "") << ','
                << c.seed << '\n';
        }
    }
    write_text(p.out / "results.csv", csv.str());
    write_text(p.out / "summary.json", summary(p.cfg, data, curves).dump(2) + "\n");
    write_text(p.out / "manifest.json", manifest(p, "run", data).dump(2) + "\n");
}

void cmd_weights(const RunOptions& opts) {
    const auto p = prepare(opts);
    std::vector<Algorithm> algorithms;
    for (auto a : p.cfg.algorithms) {
        if (a == Algorithm::skm || a == Algorithm::pcskm || a == Algorithm::mpckm) algorithms.push_back(a);
    }
    if (algorithms.empty()) throw ConfigError("algorithms: weights needs at least one of SKM, PCSKM, MPCKM");
    const auto data = materialize(p.cfg);
    prepare_output(p.out, opts.force);

    struct Profile {
        std::vector<double> sum;
        double constraints = 0.0;
        std::size_t cells = 0;
    };
    std::vector<CellKey> order;
    std::map<CellKey, Profile> profiles;
    for (const auto& d : data) {
        auto o = cv_options(p, algorithms, opts.progress, d.name);
        o.average_weights_over_grid = true;
        const auto curve = run_cv_experiment(d.data, o);
        for (const auto& c : curve.cells) {
            const CellKey key{c.algorithm, c.init, c.kind, c.fraction};
            auto [it, inserted] = profiles.try_emplace(key);
            if (inserted) {
                order.push_back(key);
                it->second.sum.assign(c.weights.size(), 0.0);
            }
            for (std::size_t j = 0; j < c.weights.size(); ++j) it->second.sum[j] += c.weights[j];
            it->second.constraints += static_cast<double>(c.constraint_count);
            ++it->second.cells;
        }
    }

    const auto& first = data.front().data;
    std::ostringstream csv;
    csv << "dataset,algorithm,init,constraint_kind,fraction,mean_constraints,feature_index,feature,truth,weight\n";
    for (const auto& key : order) {
        const auto& prof = profiles[key];
        const double cells = static_cast<double>(prof.cells);
        for (std::size_t j = 0; j < prof.sum.size(); ++j) {
            const auto truth = first.feature_truth ? (*first.feature_truth)[j] : FeatureQuality::unknown;
            const std::string name =
                j < first.feature_names.size() ? first.feature_names[j] : "f" + std::to_string(j + 1);
            csv << p.cfg.dataset.name << ',' << to_string(std::get<0>(key)) << ',' << to_string(std::get<1>(key))
                << ',' << to_string(std::get<2>(key)) << ',' << format_number(std::get<3>(key)) << ','
                << format_number(prof.constraints / cells) << ',' << j << ',' << name << ',' << to_string(truth) << ','
                << format_number(prof.sum[j] / cells) << '\n';
        }
    }
    write_text(p.out / "weights.csv", csv.str());
    write_text(p.out / "manifest.json", manifest(p, "weights", data).dump(2) + "\n");
}

void cmd_generate(const GenerateOptions& opts) {
    namespace fs = std::filesystem;
    const fs::path meta_path = fs::path(opts.out.string() + ".meta.json");
    if (!opts.force && (fs::exists(opts.out) || fs::exists(meta_path))) {
        throw ConfigError(opts.out.string() + " already exists (use --force to overwrite)");
    }
    json meta;
    meta["generator"] = opts.kind;
    meta["seed"] = opts.seed;
    json params;
    LabeledDataset ds = [&] {
        if (opts.kind == "brodinova") {
            const auto& b = opts.brodinova;
            params = {{"clusters", b.clusters},
                      {"per_cluster", b.per_cluster},
                      {"informative", b.informative},
                      {"uninformative", b.uninformative},
                      {"separation", b.separation}};
            return generate_brodinova(b, opts.seed);
        }
        if (!opts.input) throw ConfigError(opts.kind + " needs --input");
        const auto input = load_csv(*opts.input, opts.label_column);
        params["input"] = opts.input->string();
        if (opts.label_column) params["label_column"] = *opts.label_column;
        if (opts.kind == "contaminate") {
            params["count"] = opts.count;
            params["rate"] = opts.rate;
            return contaminate_exponential(input, opts.count, opts.rate, opts.seed);
        }
        if (opts.kind == "subsample") {
            if (opts.classes.empty()) throw ConfigError("subsample needs --classes");
            params["classes"] = opts.classes;
            params["per_class"] = opts.per_class;
            return subsample_classes(input, opts.classes, opts.per_class, opts.seed);
        }
        throw ConfigError("unknown generator '" + opts.kind + "' (expected brodinova, contaminate or subsample)");
    }();
    meta["params"] = params;
    meta["n"] = ds.matrix.n();
    meta["p"] = ds.matrix.p();
    meta["class_count"] = ds.class_count;
    meta["class_names"] = ds.class_names;
    meta["feature_names"] = ds.feature_names;
    json truth = json::array();
    if (ds.feature_truth) {
        for (auto q : *ds.feature_truth) truth.push_back(to_string(q));
    }
    meta["feature_truth"] = truth;

    if (opts.out.has_parent_path()) fs::create_directories(opts.out.parent_path());
    write_csv(ds, opts.out);
    write_text(meta_path, meta.dump(2) + "\n");
}

void cmd_audit_table1(const std::vector<std::uint64_t>& points, int folds, std::ostream& out) {
    if (folds < 2) throw ConfigError("--folds must be >= 2");
    out << "points,cv_labels,pool,sample_1pct,sample_10pct\n";
    for (auto n : points) {
        const auto pool = table1_pool_size(n, static_cast<std::uint64_t>(folds));
        out << n << ',' << table1_training_labels(n, static_cast<std::uint64_t>(folds)) << ',' << pool << ','
            << sample_size(pool, 0.01) << ',' << sample_size(pool, 0.10) << '\n';
    }
}

}  // namespace pcskm::cli
