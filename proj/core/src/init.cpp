#include "pcskm/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pcskm/error.hpp"

namespace pcskm {
namespace {

void check_k(const DataMatrix& m, std::size_t k) {
    if (k < 1) throw DataError("k must be >= 1");
    if (k > m.n()) {
        throw DataError("k = " + std::to_string(k) + " exceeds the " + std::to_string(m.n()) + " data points");
    }
}

std::size_t max_norm_index(const DataMatrix& m) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t i = 0; i < m.n(); ++i) {
        double norm = 0.0;
        for (double v : m.row(i)) norm += v * v;
        if (norm > best_norm) {
            best_norm = norm;
            best = i;
        }
    }
    return best;
}

[[noreturn]] void throw_indistinct(std::size_t k) {
    throw DataError("cannot place " + std::to_string(k) + " distinct centroids: too few distinct points");
}

// Tracks the squared distance from every point to its nearest chosen centroid.
class NearestTracker {
public:
    explicit NearestTracker(const DataMatrix& m)
        : m_(m), min_d_(m.n(), std::numeric_limits<double>::infinity()) {}

    void add(std::span<const double> centroid) {
        for (std::size_t i = 0; i < m_.n(); ++i) {
            min_d_[i] = std::min(min_d_[i], squared_distance(m_.row(i), centroid));
        }
    }
    [[nodiscard]] double operator[](std::size_t i) const { return min_d_[i]; }

    /// argmax of score(i) * min distance over points at positive distance; ties to the lowest index.
    template <class Score>
    std::size_t farthest(Score score) const {
        std::size_t best = m_.n();
        double best_v = -1.0;
        for (std::size_t i = 0; i < m_.n(); ++i) {
            if (!(min_d_[i] > 0.0)) continue;
            const double v = score(i) * min_d_[i];
            if (v > best_v) {
                best_v = v;
                best = i;
            }
        }
        return best;
    }

private:
    const DataMatrix& m_;
    std::vector<double> min_d_;
};

InitResult make_result(InitMethod method, std::size_t k, std::size_t p) {
    InitResult r;
    r.method = method;
    r.centroids = Matrix(k, p);
    r.provenance.reserve(k);
    r.from_neighborhood.reserve(k);
    return r;
}

void put_point(InitResult& r, const DataMatrix& m, std::size_t slot, std::size_t point) {
    std::copy(m.row(point).begin(), m.row(point).end(), r.centroids.row(slot).begin());
    r.provenance.push_back(point);
    r.from_neighborhood.push_back(false);
}

std::vector<double> euclidean_distances(const DataMatrix& m) {
    const std::size_t n = m.n();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d[i * n + j] = d[j * n + i] = std::sqrt(squared_distance(m.row(i), m.row(j)));
        }
    }
    return d;
}

}  // namespace

std::string_view to_string(InitMethod m) noexcept {
    switch (m) {
        case InitMethod::maximin: return "maximin";
        case InitMethod::dkmpp: return "dkmpp";
        case InitMethod::robin: return "robin";
        case InitMethod::seeding: return "seeding";
    }
    return "maximin";
}

InitMethod parse_init_method(std::string_view name) {
    if (name == "maximin") return InitMethod::maximin;
    if (name == "dkmpp" || name == "dkm++") return InitMethod::dkmpp;
    if (name == "robin") return InitMethod::robin;
    if (name == "seeding") return InitMethod::seeding;
    throw ConfigError("unknown init method '" + std::string(name) + "'");
}

InitResult maximin_init(const DataMatrix& m, std::size_t k) {
    check_k(m, k);
    auto r = make_result(InitMethod::maximin, k, m.p());
    NearestTracker near(m);
    std::size_t next = max_norm_index(m);
    for (std::size_t slot = 0; slot < k; ++slot) {
        if (slot > 0) {
            next = near.farthest([](std::size_t) { return 1.0; });
            if (next == m.n()) throw_indistinct(k);
        }
        put_point(r, m, slot, next);
        near.add(m.row(next));
    }
    return r;
}

std::vector<double> kernel_density(const DataMatrix& m) {
    const std::size_t n = m.n();
    if (n < 2) throw DataError("density estimate needs at least two points");
    const auto dist = euclidean_distances(m);

    double bandwidth = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) nearest = std::min(nearest, dist[i * n + j]);
        }
        bandwidth += nearest;
    }
    bandwidth /= static_cast<double>(n);
    if (!(bandwidth > 0.0)) bandwidth = 1.0;  // every point duplicated

    const double scale = 1.0 / (2.0 * bandwidth * bandwidth);
    std::vector<double> density(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = dist[i * n + j];
            density[i] += std::exp(-d * d * scale);
        }
    }
    return density;
}

InitResult dkmpp_init(const DataMatrix& m, std::size_t k) {
    check_k(m, k);
    auto r = make_result(InitMethod::dkmpp, k, m.p());
    if (m.n() < 2) {
        put_point(r, m, 0, 0);
        return r;
    }
    const auto density = kernel_density(m);
    const auto first = static_cast<std::size_t>(std::max_element(density.begin(), density.end()) - density.begin());

    NearestTracker near(m);
    put_point(r, m, 0, first);
    near.add(m.row(first));
    for (std::size_t slot = 1; slot < k; ++slot) {
        const auto next = near.farthest([&](std::size_t i) { return density[i]; });
        if (next == m.n()) throw_indistinct(k);
        put_point(r, m, slot, next);
        near.add(m.row(next));
    }
    return r;
}

std::vector<double> local_outlier_factor(const DataMatrix& m, std::size_t neighbors) {
    const std::size_t n = m.n();
    if (neighbors < 1 || neighbors >= n) {
        throw DataError("LOF neighbourhood size " + std::to_string(neighbors) + " must lie in [1, n)");
    }
    const auto dist = euclidean_distances(m);
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<std::vector<std::size_t>> knn(n);
    std::vector<double> k_distance(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::erase(order, i);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(neighbors), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              const double da = dist[i * n + a];
                              const double db = dist[i * n + b];
                              return da < db || (da == db && a < b);
                          });
        knn[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(neighbors));
        k_distance[i] = dist[i * n + knn[i].back()];
        order.resize(n);
    }

    std::vector<double> lrd(n);
    for (std::size_t i = 0; i < n; ++i) {
        double reach = 0.0;
        for (auto o : knn[i]) reach += std::max(k_distance[o], dist[i * n + o]);
        lrd[i] = reach > 0.0 ? static_cast<double>(neighbors) / reach : inf;
    }

    std::vector<double> lof(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (auto o : knn[i]) {
            if (std::isinf(lrd[i])) {
                sum += std::isinf(lrd[o]) ? 1.0 : 0.0;
            } else {
                sum += lrd[o] / lrd[i];
            }
        }
        lof[i] = sum / static_cast<double>(neighbors);
    }
    return lof;
}

InitResult robin_init(const DataMatrix& m, std::size_t k, const RobinOptions& opts) {
    check_k(m, k);
    if (opts.neighbors < 1 || opts.neighbors >= m.n()) {
        throw DataError("ROBIN neighbourhood size " + std::to_string(opts.neighbors) + " must lie in [1, n)");
    }
    auto r = make_result(InitMethod::robin, k, m.p());
    const auto lof = local_outlier_factor(m, opts.neighbors);
    const auto reference = max_norm_index(m);

    // Candidate ranking key: distance to the reference point for the first centroid, then to
    // the nearest chosen centroid.
    std::vector<double> key(m.n());
    for (std::size_t i = 0; i < m.n(); ++i) key[i] = squared_distance(m.row(i), m.row(reference));

    NearestTracker near(m);
    std::vector<std::size_t> order(m.n());
    for (std::size_t slot = 0; slot < k; ++slot) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });

        std::size_t pick = m.n();
        std::size_t fallback = m.n();
        double fallback_gap = std::numeric_limits<double>::infinity();
        for (auto i : order) {
            if (slot > 0 && !(near[i] > 0.0)) continue;
            const double gap = std::abs(lof[i] - 1.0);
            if (gap <= opts.band) {
                pick = i;
                break;
            }
            if (gap < fallback_gap) {
                fallback_gap = gap;
                fallback = i;
            }
        }
        if (pick == m.n()) pick = fallback;
        if (pick == m.n()) throw_indistinct(k);

        put_point(r, m, slot, pick);
        near.add(m.row(pick));
        for (std::size_t i = 0; i < m.n(); ++i) key[i] = near[i];
    }
    return r;
}

std::vector<std::vector<std::size_t>> must_link_neighborhoods(const ConstraintSet& constraints) {
    const std::size_t n = constraints.point_count();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    std::vector<bool> mentioned(n, false);
    for (const auto& c : constraints.constraints()) {
        if (c.kind != ConstraintKind::must_link) continue;
        mentioned[c.i] = mentioned[c.j] = true;
        const auto a = find(c.i);
        const auto b = find(c.j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }

    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!mentioned[i]) continue;
        const auto root = find(i);
        if (slot[root] == n) {
            slot[root] = groups.size();
            groups.emplace_back();
        }
        groups[slot[root]].push_back(i);
    }
    return groups;
}

InitResult seeded_init(const DataMatrix& m, std::size_t k, const ConstraintSet& constraints) {
    check_k(m, k);
    if (!constraints.empty() && constraints.point_count() != m.n()) {
        throw DataError("constraint set covers " + std::to_string(constraints.point_count()) + " points, data has " +
                        std::to_string(m.n()));
    }
    auto r = make_result(InitMethod::seeding, k, m.p());

    auto groups = must_link_neighborhoods(constraints);
    // Largest first; equal sizes keep smallest-member order (groups are already sorted by it).
    std::stable_sort(groups.begin(), groups.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });

    NearestTracker near(m);
    std::size_t slot = 0;
    for (; slot < std::min(k, groups.size()); ++slot) {
        auto row = r.centroids.row(slot);
        for (auto i : groups[slot]) {
            for (std::size_t j = 0; j < m.p(); ++j) row[j] += m(i, j);
        }
        for (auto& v : row) v /= static_cast<double>(groups[slot].size());
        for (std::size_t prev = 0; prev < slot; ++prev) {
            if (squared_distance(r.centroids.row(prev), row) == 0.0) throw_indistinct(k);
        }
        r.provenance.push_back(groups[slot].front());
        r.from_neighborhood.push_back(true);
        near.add(row);
    }
    for (; slot < k; ++slot) {
        const auto next = slot == 0 ? max_norm_index(m) : near.farthest([](std::size_t) { return 1.0; });
        if (next == m.n()) throw_indistinct(k);
        put_point(r, m, slot, next);
        near.add(m.row(next));
    }
    return r;
}

InitResult initialize(InitMethod method, const DataMatrix& m, std::size_t k, const ConstraintSet& constraints,
                      const RobinOptions& robin) {
    switch (method) {
        case InitMethod::maximin: return maximin_init(m, k);
        case InitMethod::dkmpp: return dkmpp_init(m, k);
        case InitMethod::robin: return robin_init(m, k, robin);
        case InitMethod::seeding: return seeded_init(m, k, constraints);
    }
    throw ConfigError("unknown init method");
}

}  // namespace pcskm
