#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pcskm {

enum class ConstraintKind { must_link, cannot_link };

enum class KindFilter { both, ml_only, cl_only };

std::string_view to_string(KindFilter f) noexcept;
KindFilter parse_kind_filter(std::string_view name);

struct Constraint {
    std::size_t i = 0;
    std::size_t j = 0;
    ConstraintKind kind = ConstraintKind::must_link;
    double cost = 1.0;

    friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct Partner {
    std::size_t point = 0;
    std::size_t constraint = 0;  // index into ConstraintSet::constraints()
};

/// Deduplicated pairwise constraints over a fixed point count, with a per-point partner index.
class ConstraintSet {
public:
    explicit ConstraintSet(std::size_t point_count = 0) : partners_(point_count) {}

    /// Canonicalises (i, j) to i < j. Throws DataError on self pairs, out-of-range
    /// indices, negative cost, duplicates, or a pair already present with the other kind.
    void add(std::size_t i, std::size_t j, ConstraintKind kind, double cost = 1.0);

    [[nodiscard]] std::size_t point_count() const noexcept { return partners_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return constraints_.size(); }
    [[nodiscard]] bool empty() const noexcept { return constraints_.empty(); }
    [[nodiscard]] const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
    [[nodiscard]] std::span<const Partner> partners(std::size_t point) const noexcept {
        return partners_[point];
    }
    [[nodiscard]] std::size_t count(ConstraintKind kind) const noexcept;

private:
    std::vector<Constraint> constraints_;
    std::vector<std::vector<Partner>> partners_;
    std::unordered_map<std::uint64_t, ConstraintKind> seen_;
};

/// Every unordered pair of `subset` as MUST-LINK (same class) or CANNOT-LINK. Negative labels
/// mark unlabeled points and are rejected.
ConstraintSet build_constraint_pool(std::span<const int> labels, std::span<const std::size_t> subset);

/// round(fraction * |filtered pool|) constraints drawn uniformly without replacement, returned in
/// canonical (i, j) order.
ConstraintSet sample_constraints(const ConstraintSet& pool, double fraction, KindFilter filter,
                                 std::uint64_t seed);

/// Number of constraints sample_constraints would draw from a pool of this size.
std::size_t sample_size(std::size_t pool_size, double fraction);

}  // namespace pcskm
