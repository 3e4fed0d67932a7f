#include "pcskm/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "pcskm/error.hpp"
#include "pcskm/random.hpp"

namespace pcskm {

std::string_view to_string(KindFilter f) noexcept {
    switch (f) {
        case KindFilter::both: return "both";
        case KindFilter::ml_only: return "ml_only";
        case KindFilter::cl_only: return "cl_only";
    }
    return "both";
}

KindFilter parse_kind_filter(std::string_view name) {
    if (name == "both") return KindFilter::both;
    if (name == "ml_only" || name == "ml" || name == "must_link") return KindFilter::ml_only;
    if (name == "cl_only" || name == "cl" || name == "cannot_link") return KindFilter::cl_only;
    throw ConfigError("unknown constraint kind '" + std::string(name) + "'");
}

void ConstraintSet::add(std::size_t i, std::size_t j, ConstraintKind kind, double cost) {
    if (i == j) throw DataError("constraint pairs a point with itself (" + std::to_string(i) + ")");
    if (i > j) std::swap(i, j);
    if (j >= partners_.size()) {
        throw DataError("constraint (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") out of range for " + std::to_string(partners_.size()) + " points");
    }
    if (!(cost >= 0.0) || !std::isfinite(cost)) throw DataError("constraint cost must be finite and >= 0");

    const std::uint64_t key = static_cast<std::uint64_t>(i) * partners_.size() + j;
    const auto [it, inserted] = seen_.try_emplace(key, kind);
    if (!inserted) {
        throw DataError("pair (" + std::to_string(i) + ", " + std::to_string(j) + ") " +
                        (it->second == kind ? "duplicated" : "is both MUST-LINK and CANNOT-LINK"));
    }
    const std::size_t idx = constraints_.size();
    constraints_.push_back({i, j, kind, cost});
    partners_[i].push_back({j, idx});
    partners_[j].push_back({i, idx});
}

std::size_t ConstraintSet::count(ConstraintKind kind) const noexcept {
    return static_cast<std::size_t>(std::count_if(constraints_.begin(), constraints_.end(),
                                                  [kind](const Constraint& c) { return c.kind == kind; }));
}

ConstraintSet build_constraint_pool(std::span<const int> labels, std::span<const std::size_t> subset) {
    std::vector<std::size_t> points(subset.begin(), subset.end());
    std::sort(points.begin(), points.end());
    for (auto idx : points) {
        if (idx >= labels.size()) throw DataError("pool index " + std::to_string(idx) + " out of range");
        if (labels[idx] < 0) throw DataError("pool index " + std::to_string(idx) + " is unlabeled");
    }
    ConstraintSet pool(labels.size());
    for (std::size_t a = 0; a < points.size(); ++a) {
        for (std::size_t b = a + 1; b < points.size(); ++b) {
            const auto i = points[a];
            const auto j = points[b];
            pool.add(i, j, labels[i] == labels[j] ? ConstraintKind::must_link : ConstraintKind::cannot_link);
        }
    }
    return pool;
}

std::size_t sample_size(std::size_t pool_size, double fraction) {
    // llround rounds half away from zero.
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pool_size)));
}

ConstraintSet sample_constraints(const ConstraintSet& pool, double fraction, KindFilter filter,
                                 std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ConfigError("constraint fraction " + std::to_string(fraction) + " outside (0, 1]");
    }
    std::vector<std::size_t> eligible;
    const auto& all = pool.constraints();
    for (std::size_t c = 0; c < all.size(); ++c) {
        const bool keep = filter == KindFilter::both ||
                          (filter == KindFilter::ml_only && all[c].kind == ConstraintKind::must_link) ||
                          (filter == KindFilter::cl_only && all[c].kind == ConstraintKind::cannot_link);
        if (keep) eligible.push_back(c);
    }
    if (eligible.empty()) {
        throw DataError("no " + std::string(to_string(filter)) + " constraints to sample from");
    }

    const std::size_t take = std::min(sample_size(eligible.size(), fraction), eligible.size());
    Rng rng(seed);
    for (std::size_t t = 0; t < take; ++t) {
        const auto pick = t + uniform_below(rng, eligible.size() - t);
        std::swap(eligible[t], eligible[pick]);
    }
    eligible.resize(take);
    std::sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(all[a].i, all[a].j) < std::tie(all[b].i, all[b].j);
    });

    ConstraintSet out(pool.point_count());
    for (auto c : eligible) out.add(all[c].i, all[c].j, all[c].kind, all[c].cost);
    return out;
}

}  // namespace pcskm
