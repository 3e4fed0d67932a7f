#include <algorithm>
#include <numeric>
#include <random>
#include <tuple>
#include <set>

#include "doctest.h"
#include "pcskm/constraints.hpp"
#include "pcskm/error.hpp"
#include "pcskm/evaluation.hpp"

using namespace pcskm;

namespace {

std::vector<std::size_t> iota(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

}  // namespace

TEST_CASE("ConstraintSet canonicalises and rejects bad pairs") {
    ConstraintSet cs(4);
    cs.add(2, 1, ConstraintKind::must_link);
    CHECK(cs.constraints()[0].i == 1);
    CHECK(cs.constraints()[0].j == 2);
    CHECK(cs.constraints()[0].cost == 1.0);
    CHECK(cs.partners(1).size() == 1);
    CHECK(cs.partners(2)[0].point == 1);
    CHECK_THROWS_AS(cs.add(1, 1, ConstraintKind::must_link), DataError);
    CHECK_THROWS_AS(cs.add(1, 4, ConstraintKind::must_link), DataError);
    CHECK_THROWS_AS(cs.add(1, 2, ConstraintKind::must_link), DataError);
    CHECK_THROWS_AS(cs.add(2, 1, ConstraintKind::cannot_link), DataError);
    CHECK_THROWS_AS(cs.add(0, 3, ConstraintKind::cannot_link, -1.0), DataError);
}

TEST_CASE("build_constraint_pool on three points") {
    const std::vector<int> labels{0, 0, 1};
    const auto pool = build_constraint_pool(labels, iota(3));
    REQUIRE(pool.size() == 3);
    const auto& c = pool.constraints();
    CHECK(c[0] == Constraint{0, 1, ConstraintKind::must_link, 1.0});
    CHECK(c[1] == Constraint{0, 2, ConstraintKind::cannot_link, 1.0});
    CHECK(c[2] == Constraint{1, 2, ConstraintKind::cannot_link, 1.0});
}

TEST_CASE("pool sizes of the Iris and Brodinova training sets") {
    std::vector<int> labels(150);
    for (std::size_t i = 0; i < 150; ++i) labels[i] = static_cast<int>(i / 50);
    CHECK(build_constraint_pool(labels, iota(135)).size() == 9045);
    CHECK(build_constraint_pool(labels, iota(108)).size() == 5778);
}

TEST_CASE("pool counts follow class sizes") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 30; ++t) {
        const std::size_t m = 2 + rng() % 40;
        const int classes = 1 + static_cast<int>(rng() % 4);
        std::vector<int> labels(m);
        std::vector<std::size_t> sizes(static_cast<std::size_t>(classes), 0);
        for (auto& l : labels) {
            l = static_cast<int>(rng() % static_cast<std::uint64_t>(classes));
            ++sizes[static_cast<std::size_t>(l)];
        }
        const auto pool = build_constraint_pool(labels, iota(m));
        std::size_t ml = 0;
        for (auto s : sizes) ml += s * (s - (s > 0 ? 1 : 0)) / 2;
        CHECK(pool.size() == m * (m - 1) / 2);
        CHECK(pool.count(ConstraintKind::must_link) == ml);
        CHECK(pool.count(ConstraintKind::cannot_link) == pool.size() - ml);
    }
}

TEST_CASE("build_constraint_pool rejects unlabeled points") {
    const std::vector<int> labels{0, -1, 1};
    CHECK_THROWS_AS((void)build_constraint_pool(labels, iota(3)), DataError);
}

TEST_CASE("sample sizes round half away from zero") {
    CHECK(sample_size(9045, 0.01) == 90);
    CHECK(sample_size(9045, 0.10) == 905);  // 904.5
    CHECK(sample_size(10, 0.25) == 3);      // 2.5
    CHECK(sample_size(10, 0.05) == 1);      // 0.5
}

TEST_CASE("sample_constraints") {
    std::vector<int> labels(150);
    for (std::size_t i = 0; i < 150; ++i) labels[i] = static_cast<int>(i / 50);
    const auto pool = build_constraint_pool(labels, iota(135));
    CHECK(sample_constraints(pool, 0.01, KindFilter::both, 1).size() == 90);
    const auto big = sample_constraints(pool, 0.10, KindFilter::both, 1);
    CHECK(big.size() == 905);
    CHECK(big.constraints() == sample_constraints(pool, 0.10, KindFilter::both, 1).constraints());
    CHECK(big.constraints() != sample_constraints(pool, 0.10, KindFilter::both, 2).constraints());
    CHECK(std::is_sorted(big.constraints().begin(), big.constraints().end(),
                         [](const Constraint& a, const Constraint& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); }));

    const auto ml = sample_constraints(pool, 0.5, KindFilter::ml_only, 3);
    CHECK(ml.count(ConstraintKind::cannot_link) == 0);
    CHECK(ml.size() == sample_size(pool.count(ConstraintKind::must_link), 0.5));

    ConstraintSet small(3);
    small.add(0, 1, ConstraintKind::must_link);
    small.add(0, 2, ConstraintKind::cannot_link);
    const auto only = sample_constraints(small, 1.0, KindFilter::ml_only, 9);
    REQUIRE(only.size() == 1);
    CHECK(only.constraints()[0] == Constraint{0, 1, ConstraintKind::must_link, 1.0});

    CHECK_THROWS_AS((void)sample_constraints(small, 0.0, KindFilter::both, 1), ConfigError);
    CHECK_THROWS_AS((void)sample_constraints(small, 1.5, KindFilter::both, 1), ConfigError);
    ConstraintSet ml_pool(2);
    ml_pool.add(0, 1, ConstraintKind::must_link);
    CHECK_THROWS_AS((void)sample_constraints(ml_pool, 1.0, KindFilter::cl_only, 1), DataError);
}

TEST_CASE("kind filter names") {
    CHECK(parse_kind_filter("both") == KindFilter::both);
    CHECK(parse_kind_filter("ml_only") == KindFilter::ml_only);
    CHECK(parse_kind_filter("cl") == KindFilter::cl_only);
    CHECK_THROWS_AS((void)parse_kind_filter("maybe"), ConfigError);
}
