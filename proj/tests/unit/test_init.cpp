#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "pcskm/error.hpp"
#include "pcskm/init.hpp"
#include "pcskm/random.hpp"
#include "test_util.hpp"

using namespace pcskm;

namespace {

std::vector<double> col0(const Matrix& c) {
    std::vector<double> v;
    for (std::size_t k = 0; k < c.rows(); ++k) v.push_back(c(k, 0));
    return v;
}

bool is_data_point(const DataMatrix& m, std::span<const double> c) {
    for (std::size_t i = 0; i < m.n(); ++i) {
        if (std::equal(c.begin(), c.end(), m.row(i).begin())) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("maximin") {
    const auto m = testutil::column({0, 1, 10});
    CHECK(col0(maximin_init(m, 2).centroids) == std::vector<double>{10, 0});
    CHECK(col0(maximin_init(m, 1).centroids) == std::vector<double>{10});
    auto all = col0(maximin_init(m, 3).centroids);
    std::sort(all.begin(), all.end());
    CHECK(all == std::vector<double>{0, 1, 10});
    CHECK_THROWS_AS((void)maximin_init(m, 4), DataError);
}

TEST_CASE("dkm++ picks one centroid per blob") {
    const auto m = testutil::column({0, 0.1, 0.2, 10, 10.1});
    const auto c = col0(dkmpp_init(m, 2).centroids);
    CHECK(std::count_if(c.begin(), c.end(), [](double x) { return x <= 0.2; }) == 1);
    CHECK(std::count_if(c.begin(), c.end(), [](double x) { return x >= 10; }) == 1);

    // k = 1: the density mode.
    const auto dens = kernel_density(m);
    const auto mode = static_cast<std::size_t>(std::max_element(dens.begin(), dens.end()) - dens.begin());
    CHECK(dkmpp_init(m, 1).provenance == std::vector<std::size_t>{mode});

    CHECK_THROWS_AS((void)dkmpp_init(testutil::column({3, 3, 3}), 2), DataError);
    CHECK_THROWS_AS((void)dkmpp_init(m, 6), DataError);
}

TEST_CASE("robin skips the far outlier") {
    Rng rng(17);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 20; ++i) rows.push_back({standard_normal(rng), standard_normal(rng)});
    rows.push_back({60.0, 60.0});
    const auto m = DataMatrix::from_rows(rows);
    const auto lof = local_outlier_factor(m, 10);
    CHECK(lof[20] > 1.05);

    const auto r = robin_init(m, 2, {10, 0.05});
    CHECK(std::find(r.provenance.begin(), r.provenance.end(), 20) == r.provenance.end());
    const auto one = robin_init(m, 1);
    CHECK(one.provenance[0] != 20);

    CHECK_THROWS_AS((void)robin_init(testutil::column({2, 2, 2, 2}), 2, {2, 0.05}), DataError);
    CHECK_THROWS_AS((void)robin_init(m, 2, {21, 0.05}), DataError);
}

TEST_CASE("seeding closes must-links and fills by farthest point") {
    const auto m = testutil::column({0, 2, 4, 10});
    ConstraintSet cs(4);
    cs.add(0, 1, ConstraintKind::must_link);
    cs.add(1, 2, ConstraintKind::must_link);
    const auto r = seeded_init(m, 2, cs);
    CHECK(col0(r.centroids) == std::vector<double>{2, 10});
    CHECK(r.from_neighborhood == std::vector<bool>{true, false});

    // Exactly k disjoint groups.
    ConstraintSet two(4);
    two.add(0, 1, ConstraintKind::must_link);
    two.add(2, 3, ConstraintKind::must_link);
    CHECK(col0(seeded_init(m, 2, two).centroids) == std::vector<double>{1, 7});

    // No constraints reduces to maximin.
    CHECK(seeded_init(m, 2, ConstraintSet(4)).centroids == maximin_init(m, 2).centroids);
}

TEST_CASE("must-link neighbourhoods match a union-find oracle") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 5 + rng() % 20;
        ConstraintSet cs(n);
        std::vector<std::size_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x];
            return x;
        };
        std::set<std::size_t> mentioned;
        for (int e = 0; e < 8; ++e) {
            const auto a = rng() % n, b = rng() % n;
            if (a == b) continue;
            try {
                cs.add(a, b, ConstraintKind::must_link);
            } catch (const DataError&) {
                continue;
            }
            parent[find(a)] = find(b);
            mentioned.insert(a);
            mentioned.insert(b);
        }
        const auto groups = must_link_neighborhoods(cs);
        std::size_t covered = 0;
        for (const auto& g : groups) {
            covered += g.size();
            for (auto x : g) CHECK(find(x) == find(g.front()));
        }
        CHECK(covered == mentioned.size());
        for (std::size_t a = 0; a < groups.size(); ++a)
            for (std::size_t b = a + 1; b < groups.size(); ++b) CHECK(find(groups[a][0]) != find(groups[b][0]));
    }
}

TEST_CASE("all methods are deterministic and return valid centroids") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 20; ++t) {
        const auto m = testutil::random_matrix(rng, 15 + static_cast<std::size_t>(t), 3);
        ConstraintSet cs(m.n());
        cs.add(0, 1, ConstraintKind::must_link);
        for (auto method : {InitMethod::maximin, InitMethod::dkmpp, InitMethod::robin, InitMethod::seeding}) {
            for (std::size_t k = 1; k <= 4; ++k) {
                const auto a = initialize(method, m, k, cs);
                const auto b = initialize(method, m, k, cs);
                REQUIRE(a.centroids == b.centroids);
                REQUIRE(a.centroids.rows() == k);
                REQUIRE(a.centroids.cols() == m.p());
                for (std::size_t x = 0; x < k; ++x) {
                    if (method != InitMethod::seeding) CHECK(is_data_point(m, a.centroids.row(x)));
                    for (std::size_t y = x + 1; y < k; ++y) CHECK(a.centroids.row(x)[0] != a.centroids.row(y)[0]);
                }
            }
        }
    }
}

TEST_CASE("init names") {
    CHECK(parse_init_method("dkmpp") == InitMethod::dkmpp);
    CHECK(parse_init_method("dkm++") == InitMethod::dkmpp);
    CHECK(parse_init_method("seeding") == InitMethod::seeding);
    CHECK(to_string(InitMethod::robin) == "robin");
    CHECK_THROWS_AS((void)parse_init_method("random"), ConfigError);
}
