#include "pcskm/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <tuple>

#include "pcskm/error.hpp"
#include "pcskm/random.hpp"

namespace pcskm {
namespace {

constexpr std::uint64_t kFoldTag = 0x466f6c64;        // "Fold"
constexpr std::uint64_t kConstraintTag = 0x436f6e73;  // "Cons"

std::uint64_t pairs(std::uint64_t m) { return m < 2 ? 0 : m * (m - 1) / 2; }

}  // namespace

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] == fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] != fold) out.push_back(i);
    }
    return out;
}

FoldPlan make_folds(std::size_t n, int folds, std::uint64_t seed) {
    if (folds < 1) throw ConfigError("fold count must be positive");
    if (static_cast<std::size_t>(folds) > n) {
        throw ConfigError(std::to_string(folds) + " folds requested for " + std::to_string(n) + " points");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (std::size_t t = n; t > 1; --t) {
        std::swap(perm[t - 1], perm[uniform_below(rng, t)]);
    }
    FoldPlan plan;
    plan.folds = folds;
    plan.seed = seed;
    plan.fold_of.resize(n);
    for (std::size_t t = 0; t < n; ++t) plan.fold_of[perm[t]] = static_cast<int>(t % static_cast<std::size_t>(folds));
    return plan;
}

double pairwise_f_score(std::span<const int> assignment, std::span<const int> labels,
                        std::span<const std::size_t> test_idx) {
    if (test_idx.size() < 2) throw DataError("pairwise F-score needs at least two test points");
    // Pair counts from the cluster x class contingency table.
    std::map<int, std::uint64_t> by_cluster;
    std::map<int, std::uint64_t> by_class;
    std::map<std::pair<int, int>, std::uint64_t> joint;
    for (auto i : test_idx) {
        ++by_cluster[assignment[i]];
        ++by_class[labels[i]];
        ++joint[{assignment[i], labels[i]}];
    }
    std::uint64_t same_cluster = 0;
    std::uint64_t same_class = 0;
    std::uint64_t both = 0;
    for (const auto& [c, cnt] : by_cluster) same_cluster += pairs(cnt);
    for (const auto& [c, cnt] : by_class) same_class += pairs(cnt);
    for (const auto& [c, cnt] : joint) both += pairs(cnt);

    if (both == 0) return 0.0;
    const double precision = static_cast<double>(both) / static_cast<double>(same_cluster);
    const double recall = static_cast<double>(both) / static_cast<double>(same_class);
    return 2.0 * precision * recall / (precision + recall);
}

std::vector<double> sparsity_grid(std::size_t p) {
    const double cap = std::sqrt(static_cast<double>(p));
    std::vector<double> grid;
    for (int t = 0;; ++t) {
        const double s = static_cast<double>(11 + 2 * t) / 10.0;
        if (s > cap + 1e-12) break;
        grid.push_back(s);
    }
    if (grid.empty()) grid.push_back(cap);
    return grid;
}

SparsityChoice sweep_sparsity(const DataMatrix& m, std::span<const int> labels, std::span<const std::size_t> test_idx,
                              Algorithm algorithm, const InitResult& init, const ConstraintSet& constraints,
                              const ConvergenceConfig& cfg, std::span<const double> grid) {
    if (!is_sparse(algorithm)) {
        throw ConfigError("sparsity sweep needs SKM or PCSKM, got " + std::string(to_string(algorithm)));
    }
    if (grid.empty()) throw ConfigError("empty sparsity grid");

    SparsityChoice best;
    best.f_score = -1.0;
    best.mean_weights.assign(m.p(), 0.0);
    for (double s : grid) {
        auto result = run_algorithm(algorithm, m, init, constraints, s, cfg);
        for (std::size_t j = 0; j < m.p(); ++j) best.mean_weights[j] += result.weights.w[j];
        const double f = pairwise_f_score(result.model.assignment, labels, test_idx);
        if (f > best.f_score) {
            best.f_score = f;
            best.s = s;
            best.result = std::move(result);
        }
    }
    for (auto& v : best.mean_weights) v /= static_cast<double>(grid.size());
    return best;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DataError("paired samples differ in length (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw DataError("paired samples are empty");

    std::vector<double> diff;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diff.push_back(d);
    }
    WilcoxonResult r;
    r.n_effective = diff.size();
    if (diff.empty()) return r;

    const std::size_t n = diff.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return std::abs(diff[x]) < std::abs(diff[y]); });

    // Average ranks over runs of equal |d|; tie_term accumulates t^3 - t.
    std::vector<double> rank(n);
    double tie_term = 0.0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && std::abs(diff[order[end]]) == std::abs(diff[order[start]])) ++end;
        const double avg = 0.5 * static_cast<double>(start + 1 + end);
        for (std::size_t t = start; t < end; ++t) rank[order[t]] = avg;
        const auto t = static_cast<double>(end - start);
        tie_term += t * t * t - t;
        start = end;
    }
    for (std::size_t i = 0; i < n; ++i) (diff[i] > 0 ? r.w_plus : r.w_minus) += rank[i];

    const double nn = static_cast<double>(n);
    if (n <= kWilcoxonExactLimit) {
        // Doubled ranks are integers; count sign assignments by doubled positive-rank sum.
        std::vector<std::uint64_t> twice(n);
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            twice[i] = static_cast<std::uint64_t>(std::llround(2.0 * rank[i]));
            total += twice[i];
        }
        std::vector<std::uint64_t> ways(total + 1, 0);
        ways[0] = 1;
        for (auto v : twice) {
            for (std::uint64_t s = total; s + 1 > v; --s) ways[s] += ways[s - v];
        }
        const auto observed = static_cast<std::int64_t>(std::llround(2.0 * r.w_plus));
        const auto center = static_cast<std::int64_t>(total);
        const std::int64_t obs_dev = std::abs(2 * observed - center);
        std::uint64_t extreme = 0;
        for (std::uint64_t s = 0; s <= total; ++s) {
            if (std::abs(2 * static_cast<std::int64_t>(s) - center) >= obs_dev) extreme += ways[s];
        }
        r.p_value = std::min(1.0, static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(n)));
        r.exact = true;
    } else {
        const double mean = nn * (nn + 1.0) / 4.0;
        const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
        const double z = var > 0.0 ? (r.w_plus - mean) / std::sqrt(var) : 0.0;
        r.p_value = std::clamp(std::erfc(std::abs(z) / std::sqrt(2.0)), std::numeric_limits<double>::min(), 1.0);
        r.exact = false;
    }
    return r;
}

std::uint64_t table1_pool_size(std::uint64_t n, std::uint64_t folds) {
    if (folds < 2 || folds > n) throw ConfigError("table audit needs 2 <= folds <= n");
    const std::uint64_t base = n / folds;
    const std::uint64_t big = n % folds;  // folds holding base + 1 points
    const std::uint64_t sum = big * pairs(n - base - 1) + (folds - big) * pairs(n - base);
    return sum / folds;
}

std::uint64_t table1_training_labels(std::uint64_t n, std::uint64_t folds) {
    if (folds < 2 || folds > n) throw ConfigError("table audit needs 2 <= folds <= n");
    const std::uint64_t base = n / folds;
    const std::uint64_t big = n % folds;
    const std::uint64_t total = big * (n - base - 1) + (folds - big) * (n - base);
    return static_cast<std::uint64_t>(std::llround(static_cast<double>(total) / static_cast<double>(folds)));
}

std::uint64_t fold_seed(std::uint64_t master, int run) {
    return derive_seed(master, {kFoldTag, static_cast<std::uint64_t>(run)});
}

std::uint64_t constraint_seed(std::uint64_t master, int run, int fold, double fraction) {
    return derive_seed(master, {kConstraintTag, static_cast<std::uint64_t>(run), static_cast<std::uint64_t>(fold),
                                static_cast<std::uint64_t>(std::llround(fraction * 1e6))});
}

std::vector<CellStats> PerformanceCurve::aggregate() const {
    using Key = std::tuple<int, int, int, double>;
    std::vector<Key> order;
    std::map<Key, std::vector<double>> groups;
    for (const auto& c : cells) {
        const Key key{static_cast<int>(c.algorithm), static_cast<int>(c.init), static_cast<int>(c.kind), c.fraction};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(c.f_score);
    }
    std::vector<CellStats> out;
    for (const auto& key : order) {
        const auto& v = groups.at(key);
        CellStats st;
        st.algorithm = static_cast<Algorithm>(std::get<0>(key));
        st.init = static_cast<InitMethod>(std::get<1>(key));
        st.kind = static_cast<KindFilter>(std::get<2>(key));
        st.fraction = std::get<3>(key);
        st.count = v.size();
        double sum = 0.0;
        for (double x : v) sum += x;
        st.mean = sum / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - st.mean) * (x - st.mean);
        st.stddev = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        out.push_back(st);
    }
    return out;
}

namespace {

// Every cell of one (run, fold) pair in canonical order.
std::vector<CvCell> run_fold(const LabeledDataset& ds, const CvOptions& opts, const FoldPlan& plan, int run, int fold,
                             const std::vector<double>& grid, const std::map<InitMethod, InitResult>& fixed_inits) {
    const auto& m = ds.matrix;
    const auto& labels = *ds.labels;
    const auto k = static_cast<std::size_t>(ds.class_count);
    const auto test = plan.test_indices(fold);
    const auto train = plan.train_indices(fold);
    const bool any_fraction = std::any_of(opts.fractions.begin(), opts.fractions.end(), [](double f) { return f > 0; });
    const ConstraintSet pool = any_fraction ? build_constraint_pool(labels, train) : ConstraintSet(m.n());

    std::vector<CvCell> cells;
    for (double fraction : opts.fractions) {
        const auto seed = constraint_seed(opts.master_seed, run, fold, fraction);
        for (auto kind : opts.kinds) {
            const ConstraintSet constraints =
                fraction > 0.0 ? sample_constraints(pool, fraction, kind, seed) : ConstraintSet(m.n());
            for (auto method : opts.inits) {
                const InitResult init = method == InitMethod::seeding ? seeded_init(m, k, constraints)
                                                                      : fixed_inits.at(method);
                for (auto algorithm : opts.algorithms) {
                    CvCell cell;
                    cell.algorithm = algorithm;
                    cell.init = method;
                    cell.kind = kind;
                    cell.fraction = fraction;
                    cell.run = run;
                    cell.fold = fold;
                    cell.seed = seed;
                    cell.constraint_count = constraints.size();
                    if (is_sparse(algorithm)) {
                        auto choice = sweep_sparsity(m, labels, test, algorithm, init, constraints, opts.convergence, grid);
                        cell.f_score = choice.f_score;
                        cell.chosen_s = choice.s;
                        cell.weights = opts.average_weights_over_grid ? std::move(choice.mean_weights)
                                                                      : std::move(choice.result.weights.w);
                    } else {
                        auto result = run_algorithm(algorithm, m, init, constraints, 0.0, opts.convergence);
                        cell.f_score = pairwise_f_score(result.model.assignment, labels, test);
                        if (algorithm == Algorithm::mpckm) cell.weights = std::move(result.weights.w);
                    }
                    cells.push_back(std::move(cell));
                }
            }
        }
    }
    return cells;
}

}  // namespace

PerformanceCurve run_cv_experiment(const LabeledDataset& ds, const CvOptions& opts) {
    ds.validate();
    if (!ds.labels) throw DataError("cross-validation needs a labeled dataset");
    if (ds.class_count < 1) throw DataError("dataset has no classes");
    if (opts.algorithms.empty() || opts.inits.empty() || opts.kinds.empty() || opts.fractions.empty()) {
        throw ConfigError("experiment grid has an empty axis");
    }
    if (opts.runs < 1) throw ConfigError("runs must be >= 1");
    if (opts.folds < 2) throw ConfigError("folds must be >= 2");
    for (double f : opts.fractions) {
        if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("fraction " + std::to_string(f) + " outside [0, 1]");
    }
    opts.convergence.validate();

    const auto& m = ds.matrix;
    const auto k = static_cast<std::size_t>(ds.class_count);
    const auto grid = opts.grid ? *opts.grid : sparsity_grid(m.p());

    // Constraint-free initialisations depend only on the data.
    std::map<InitMethod, InitResult> fixed_inits;
    for (auto method : opts.inits) {
        if (method != InitMethod::seeding) fixed_inits.emplace(method, initialize(method, m, k, ConstraintSet(m.n()), opts.robin));
    }

    std::vector<FoldPlan> plans;
    for (int run = 0; run < opts.runs; ++run) plans.push_back(make_folds(m.n(), opts.folds, fold_seed(opts.master_seed, run)));

    const std::size_t tasks = static_cast<std::size_t>(opts.runs) * static_cast<std::size_t>(opts.folds);
    std::vector<std::vector<CvCell>> results(tasks);
    std::vector<std::exception_ptr> errors(tasks);
    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex progress_mutex;

    auto worker = [&] {
        for (std::size_t t = next++; t < tasks; t = next++) {
            const int run = static_cast<int>(t / static_cast<std::size_t>(opts.folds));
            const int fold = static_cast<int>(t % static_cast<std::size_t>(opts.folds));
            try {
                results[t] = run_fold(ds, opts, plans[static_cast<std::size_t>(run)], run, fold, grid, fixed_inits);
            } catch (...) {
                errors[t] = std::current_exception();
            }
            if (opts.progress) {
                std::lock_guard lock(progress_mutex);
                opts.progress(++done, tasks);
            }
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(tasks)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    PerformanceCurve curve;
    for (auto& r : results) {
        for (auto& c : r) curve.cells.push_back(std::move(c));
    }
    return curve;
}

}  // namespace pcskm
