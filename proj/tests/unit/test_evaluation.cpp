#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "pcskm/error.hpp"
#include "pcskm/evaluation.hpp"
#include "test_util.hpp"

using namespace pcskm;

namespace {

double brute_f(const std::vector<int>& a, const std::vector<int>& l, const std::vector<std::size_t>& idx) {
    double tp = 0, sc = 0, sl = 0;
    for (std::size_t x = 0; x < idx.size(); ++x)
        for (std::size_t y = x + 1; y < idx.size(); ++y) {
            const bool c = a[idx[x]] == a[idx[y]];
            const bool k = l[idx[x]] == l[idx[y]];
            tp += c && k;
            sc += c;
            sl += k;
        }
    if (tp == 0) return 0.0;
    const double p = tp / sc, r = tp / sl;
    return 2 * p * r / (p + r);
}

// Two-sided p by listing all 2^n sign patterns of the given ranks.
double enumerate_p(const std::vector<double>& ranks, double w_plus) {
    const std::size_t n = ranks.size();
    const double total = std::accumulate(ranks.begin(), ranks.end(), 0.0);
    const double dev = std::abs(2 * w_plus - total);
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) s += ranks[i];
        if (std::abs(2 * s - total) >= dev - 1e-9) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(1ull << n);
}

std::vector<std::size_t> all(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

}  // namespace

TEST_CASE("make_folds") {
    const auto iris = make_folds(150, 10, 1);
    for (int f = 0; f < 10; ++f) {
        CHECK(iris.test_indices(f).size() == 15);
        CHECK(iris.train_indices(f).size() == 135);
    }
    const auto p = make_folds(351, 10, 2);
    std::vector<std::size_t> sizes;
    for (int f = 0; f < 10; ++f) sizes.push_back(p.test_indices(f).size());
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{35, 35, 35, 35, 35, 35, 35, 35, 35, 36});

    const auto single = make_folds(7, 7, 3);
    for (int f = 0; f < 7; ++f) CHECK(single.test_indices(f).size() == 1);

    CHECK(make_folds(100, 10, 4).fold_of == make_folds(100, 10, 4).fold_of);
    CHECK(make_folds(100, 10, 4).fold_of != make_folds(100, 10, 5).fold_of);
    CHECK_THROWS_AS((void)make_folds(5, 6, 1), ConfigError);
}

TEST_CASE("pairwise_f_score examples") {
    const std::vector<int> ab{0, 0, 1, 1};
    CHECK(pairwise_f_score(std::vector<int>{0, 0, 1, 1}, ab, all(4)) == 1.0);
    CHECK(pairwise_f_score(std::vector<int>{0, 1, 0, 1}, ab, all(4)) == 0.0);
    CHECK(pairwise_f_score(std::vector<int>{0, 0, 1, 1, 1}, std::vector<int>{0, 0, 0, 1, 1}, all(5)) == 0.5);
    CHECK_THROWS_AS((void)pairwise_f_score(ab, ab, std::vector<std::size_t>{1}), DataError);
}

TEST_CASE("pairwise_f_score matches pair enumeration") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng() % 30;
        std::vector<int> a(n), l(n);
        for (auto& x : a) x = static_cast<int>(rng() % 4);
        for (auto& x : l) x = static_cast<int>(rng() % 3);
        auto idx = all(n);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(2 + rng() % (std::min<std::size_t>(n, 20) - 1));
        const double f = pairwise_f_score(a, l, idx);
        CHECK(f == brute_f(a, l, idx));
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
}

TEST_CASE("sparsity grid") {
    const auto g4 = sparsity_grid(4);
    REQUIRE(g4.size() == 5);
    const std::vector<double> want{1.1, 1.3, 1.5, 1.7, 1.9};
    for (std::size_t i = 0; i < 5; ++i) CHECK(g4[i] == doctest::Approx(want[i]));
    CHECK(sparsity_grid(1) == std::vector<double>{1.0});
    CHECK(sparsity_grid(2).size() == 2);  // sqrt(2) = 1.414: 1.1 and 1.3
    CHECK(sparsity_grid(2)[0] == doctest::Approx(1.1));
}

TEST_CASE("sweep_sparsity prefers the smaller s on ties") {
    const auto ds = generate_brodinova({3, 20, 3, 1, 8.0}, 5);
    const auto& labels = *ds.labels;
    const auto init = initialize(InitMethod::dkmpp, ds.matrix, 3, ConstraintSet(ds.matrix.n()));
    const std::vector<double> grid{1.1, 1.3, 1.5};
    const auto r = sweep_sparsity(ds.matrix, labels, all(ds.matrix.n()), Algorithm::skm, init,
                                  ConstraintSet(ds.matrix.n()), {}, grid);
    CHECK(r.f_score == 1.0);
    CHECK(r.s == 1.1);
    CHECK(r.mean_weights.size() == 4);
    CHECK_THROWS_AS((void)sweep_sparsity(ds.matrix, labels, all(ds.matrix.n()), Algorithm::lkm, init,
                                         ConstraintSet(ds.matrix.n()), {}, grid),
                    ConfigError);
}

TEST_CASE("wilcoxon examples") {
    const std::vector<double> a{1, 2, 3}, b{1, 2, 3};
    const auto same = wilcoxon_signed_rank(a, b);
    CHECK(same.p_value == 1.0);
    CHECK(same.n_effective == 0);

    const std::vector<double> x(5, 0.0), y(5, 1.0);
    const auto r = wilcoxon_signed_rank(x, y);
    CHECK(r.w_plus == 0.0);
    CHECK(r.exact);
    CHECK(r.p_value == 0.0625);

    CHECK_THROWS_AS((void)wilcoxon_signed_rank(a, std::vector<double>{1.0}), DataError);
}

TEST_CASE("wilcoxon exact branch matches full enumeration") {
    std::mt19937_64 rng(91);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng() % kWilcoxonExactLimit;
        std::vector<double> a(n), b(n, 0.0);
        // Small integer differences force ties.
        for (auto& v : a) v = static_cast<double>(static_cast<int>(rng() % 7) - 3);
        const auto r = wilcoxon_signed_rank(a, b);
        std::vector<double> d;
        for (double v : a)
            if (v != 0) d.push_back(v);
        if (d.empty()) {
            CHECK(r.p_value == 1.0);
            continue;
        }
        std::vector<double> ranks(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            double less = 0, eq = 0;
            for (double o : d) {
                less += std::abs(o) < std::abs(d[i]);
                eq += std::abs(o) == std::abs(d[i]);
            }
            ranks[i] = less + (eq + 1) / 2;
        }
        double wp = 0;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d[i] > 0) wp += ranks[i];
        CHECK(r.exact);
        CHECK(r.w_plus == wp);
        CHECK(r.p_value == doctest::Approx(enumerate_p(ranks, wp)).epsilon(1e-12));
    }
}

TEST_CASE("wilcoxon normal branch") {
    std::vector<double> a(30), b(30, 0.0);
    for (std::size_t i = 0; i < 30; ++i) a[i] = static_cast<double>(i + 1);
    const auto r = wilcoxon_signed_rank(a, b);
    CHECK_FALSE(r.exact);
    CHECK(r.w_plus == 465.0);
    // z = (465 - 232.5) / sqrt(30 * 31 * 61 / 24)
    const double z = 232.5 / std::sqrt(30.0 * 31 * 61 / 24);
    CHECK(r.p_value == doctest::Approx(std::erfc(z / std::sqrt(2.0))));
    CHECK(r.p_value > 0.0);
}

TEST_CASE("table audit") {
    CHECK(table1_pool_size(150, 10) == 9045);
    CHECK(table1_pool_size(351, 10) == 49738);
    CHECK(table1_pool_size(424, 10) == 72618);
    CHECK(table1_pool_size(406, 10) == 66576);
    CHECK(table1_pool_size(120, 10) == 5778);
    CHECK(table1_training_labels(150, 10) == 135);
    CHECK(table1_training_labels(120, 10) == 108);
    // Independent count: (9 * C(316, 2) + C(315, 2)) / 10 = 49738.5
    CHECK((9 * 316 * 315 / 2 + 315 * 314 / 2) / 10 == 49738);
}

TEST_CASE("cv experiment baseline path and constraint accounting") {
    const auto ds = generate_brodinova({3, 20, 2, 1, 8.0}, 2);
    CvOptions o;
    o.algorithms = {Algorithm::lkm};
    o.inits = {InitMethod::maximin};
    o.kinds = {KindFilter::both};
    o.fractions = {0.0};
    o.runs = 1;
    o.master_seed = 5;
    const auto base = run_cv_experiment(ds, o);
    CHECK(base.cells.size() == 10);
    for (const auto& c : base.cells) CHECK(c.constraint_count == 0);

    o.algorithms = {Algorithm::pckm, Algorithm::pcskm};
    o.inits = {InitMethod::seeding, InitMethod::dkmpp};
    o.kinds = {KindFilter::both, KindFilter::cl_only};
    o.fractions = {0.01, 0.1};
    o.runs = 2;
    o.threads = 3;
    const auto curve = run_cv_experiment(ds, o);
    CHECK(curve.cells.size() == 2u * 10 * 2 * 2 * 2 * 2);
    for (const auto& c : curve.cells) {
        CHECK(c.f_score >= 0.0);
        CHECK(c.f_score <= 1.0);
        CHECK(c.chosen_s.has_value() == (c.algorithm == Algorithm::pcskm));
        if (c.kind == KindFilter::both) CHECK(c.constraint_count == sample_size(54 * 53 / 2, c.fraction));
    }
    o.threads = 1;
    const auto serial = run_cv_experiment(ds, o);
    for (std::size_t i = 0; i < curve.cells.size(); ++i) {
        CHECK(serial.cells[i].f_score == curve.cells[i].f_score);
        CHECK(serial.cells[i].seed == curve.cells[i].seed);
    }
    const auto stats = curve.aggregate();
    CHECK(stats.size() == 16);
    for (const auto& s : stats) CHECK(s.count == 20);
}

TEST_CASE("sampled constraints stay in the training fold") {
    std::vector<int> labels(60);
    for (std::size_t i = 0; i < 60; ++i) labels[i] = static_cast<int>(i % 3);
    for (int run = 0; run < 3; ++run) {
        const auto plan = make_folds(60, 10, fold_seed(9, run));
        for (int f = 0; f < 10; ++f) {
            const auto train = plan.train_indices(f);
            const auto pool = build_constraint_pool(labels, train);
            const auto cs = sample_constraints(pool, 0.1, KindFilter::both, constraint_seed(9, run, f, 0.1));
            for (const auto& c : cs.constraints()) {
                CHECK(plan.fold_of[c.i] != f);
                CHECK(plan.fold_of[c.j] != f);
            }
        }
    }
}

TEST_CASE("cv experiment rejects bad input") {
    auto ds = generate_brodinova({3, 10, 2, 1, 8.0}, 2);
    CvOptions o;
    o.algorithms = {Algorithm::lkm};
    o.inits = {InitMethod::maximin};
    o.kinds = {KindFilter::both};
    o.fractions = {0.1};
    o.runs = 0;
    CHECK_THROWS_AS((void)run_cv_experiment(ds, o), ConfigError);
    o.runs = 1;
    o.folds = 1;
    CHECK_THROWS_AS((void)run_cv_experiment(ds, o), ConfigError);
    o.folds = 10;
    ds.labels.reset();
    CHECK_THROWS_AS((void)run_cv_experiment(ds, o), DataError);
}
