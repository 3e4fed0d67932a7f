#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "pcskm/engines.hpp"
#include "pcskm/error.hpp"
#include "penalties.hpp"

namespace pcskm {
namespace {

bool violated(const Constraint& c, const Assignment& assignment) {
    const int a = assignment[c.i];
    const int b = assignment[c.j];
    if (a == kUnassigned || b == kUnassigned) return false;
    return c.kind == ConstraintKind::must_link ? a != b : a == b;
}

double l1(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

}  // namespace

FeatureWeights FeatureWeights::uniform(std::size_t p, double value) {
    FeatureWeights fw;
    fw.w.assign(p, value);
    fw.regime = WeightRegime::uniform;
    return fw;
}

void ConvergenceConfig::validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("convergence epsilon must be positive");
    if (max_outer_iterations < 1) throw ConfigError("max_outer_iterations must be positive");
    if (max_lloyd_iterations < 1) throw ConfigError("max_lloyd_iterations must be positive");
}

Assignment assign_lloyd(const DataMatrix& m, const Matrix& centroids, std::span<const double> w) {
    Assignment out(m.n());
    for (std::size_t i = 0; i < m.n(); ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < centroids.rows(); ++k) {
            const double d = weighted_squared_distance(m.row(i), centroids.row(k), w);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(k);
            }
        }
        out[i] = best;
    }
    return out;
}

std::vector<double> ml_penalty(std::span<const double> a, std::span<const double> b) {
    std::vector<double> f(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        f[j] = d * d;
    }
    return f;
}

std::vector<double> cl_penalty(std::span<const double> a, std::span<const double> b, const MaxSeparatedPair& pair) {
    std::vector<double> f(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        f[j] = pair.per_feature_gap[j] - d * d;
    }
    return f;
}

std::vector<double> detail::violation_costs(const DataMatrix& m, const ConstraintSet& constraints,
                                    std::span<const double> w, const MaxSeparatedPair& pair) {
    std::vector<double> out;
    out.reserve(constraints.size());
    for (const auto& c : constraints.constraints()) {
        const auto a = m.row(c.i);
        const auto b = m.row(c.j);
        double s = 0.0;
        for (std::size_t j = 0; j < m.p(); ++j) {
            const double d = a[j] - b[j];
            const double f = c.kind == ConstraintKind::must_link ? d * d : pair.per_feature_gap[j] - d * d;
            s += w[j] * f;
        }
        out.push_back(c.cost * s);
    }
    return out;
}

Assignment assign_pckm(const DataMatrix& m, const Matrix& centroids, const ConstraintSet& constraints,
                       const Assignment& current, std::span<const double> w, const MaxSeparatedPair& pair) {
    const std::size_t k = centroids.rows();
    const auto penalty = detail::violation_costs(m, constraints, w, pair);
    const auto& all = constraints.constraints();

    Assignment next(m.n(), kUnassigned);
    std::vector<double> cost(k);
    for (std::size_t i = 0; i < m.n(); ++i) {
        for (std::size_t c = 0; c < k; ++c) cost[c] = weighted_squared_distance(m.row(i), centroids.row(c), w);
        for (const auto& partner : constraints.partners(i)) {
            const int placed = partner.point < i ? next[partner.point] : current[partner.point];
            if (placed == kUnassigned) continue;
            const double pen = penalty[partner.constraint];
            if (all[partner.constraint].kind == ConstraintKind::must_link) {
                for (std::size_t c = 0; c < k; ++c) {
                    if (static_cast<int>(c) != placed) cost[c] += pen;
                }
            } else {
                cost[static_cast<std::size_t>(placed)] += pen;
            }
        }
        int best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (cost[c] < best_cost) {
                best_cost = cost[c];
                best = static_cast<int>(c);
            }
        }
        next[i] = best;
    }
    return next;
}

std::vector<std::size_t> cluster_sizes(const Assignment& assignment, std::size_t k) {
    std::vector<std::size_t> sizes(k, 0);
    for (int c : assignment) {
        if (c >= 0 && static_cast<std::size_t>(c) < k) ++sizes[static_cast<std::size_t>(c)];
    }
    return sizes;
}

Matrix update_centroids(const DataMatrix& m, Assignment& assignment, std::size_t k, std::span<const double> w) {
    const std::size_t p = m.p();
    auto means = [&] {
        Matrix sums(k, p);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < m.n(); ++i) {
            const auto c = static_cast<std::size_t>(assignment[i]);
            ++counts[c];
            for (std::size_t j = 0; j < p; ++j) sums(c, j) += m(i, j);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t j = 0; j < p; ++j) sums(c, j) /= static_cast<double>(counts[c]);
        }
        return std::pair{std::move(sums), std::move(counts)};
    };

    auto [centroids, counts] = means();
    for (std::size_t empty = 0; empty < k; ++empty) {
        if (counts[empty] != 0) continue;
        std::size_t donor = m.n();
        double farthest = -1.0;
        for (std::size_t i = 0; i < m.n(); ++i) {
            const auto c = static_cast<std::size_t>(assignment[i]);
            if (counts[c] < 2) continue;
            const double d = weighted_squared_distance(m.row(i), centroids.row(c), w);
            if (d > farthest) {
                farthest = d;
                donor = i;
            }
        }
        if (donor == m.n()) throw NumericalError("cannot repair empty cluster: fewer points than clusters");
        assignment[donor] = static_cast<int>(empty);
        std::tie(centroids, counts) = means();
    }
    return centroids;
}

std::size_t count_violations(const ConstraintSet& constraints, const Assignment& assignment) {
    std::size_t v = 0;
    for (const auto& c : constraints.constraints()) v += violated(c, assignment) ? 1 : 0;
    return v;
}

FeatureScores per_feature_bcss(const DataMatrix& m, const Assignment& assignment, const Matrix& centroids) {
    const auto mu = global_centroid(m);
    FeatureScores s;
    s.gamma.assign(m.p(), 0.0);
    for (std::size_t j = 0; j < m.p(); ++j) {
        double tss = 0.0;
        double wcss = 0.0;
        for (std::size_t i = 0; i < m.n(); ++i) {
            const double t = m(i, j) - mu[j];
            const double w = m(i, j) - centroids(static_cast<std::size_t>(assignment[i]), j);
            tss += t * t;
            wcss += w * w;
        }
        s.gamma[j] = tss - wcss;
    }
    return s;
}

FeatureScores per_feature_penalized_bcss(const DataMatrix& m, const Assignment& assignment, const Matrix& centroids,
                                         const ConstraintSet& constraints, const MaxSeparatedPair& pair) {
    auto s = per_feature_bcss(m, assignment, centroids);
    s.penalized = true;
    for (const auto& c : constraints.constraints()) {
        if (!violated(c, assignment)) continue;
        const auto a = m.row(c.i);
        const auto b = m.row(c.j);
        for (std::size_t j = 0; j < m.p(); ++j) {
            const double d = a[j] - b[j];
            const double f = c.kind == ConstraintKind::must_link ? d * d : pair.per_feature_gap[j] - d * d;
            s.gamma[j] -= c.cost * f;
        }
    }
    return s;
}

std::vector<double> soft_threshold_weights(std::span<const double> gamma, double delta) {
    std::vector<double> w(gamma.size(), 0.0);
    double norm = 0.0;
    for (std::size_t j = 0; j < gamma.size(); ++j) {
        if (gamma[j] > 0.0) w[j] = std::max(gamma[j] - delta, 0.0);
        norm += w[j] * w[j];
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (auto& v : w) v /= norm;
    }
    return w;
}

FeatureWeights update_weights(FeatureScores& scores, double s) {
    const auto& gamma = scores.gamma;
    if (gamma.empty()) throw NumericalError("no feature scores");
    for (double g : gamma) {
        if (!std::isfinite(g)) throw NumericalError("non-finite feature score");
    }
    const double top = *std::max_element(gamma.begin(), gamma.end());
    if (!(top > 0.0)) throw NumericalError("no informative signal: every feature score is <= 0");

    FeatureWeights out;
    out.regime = WeightRegime::sparse_l1l2;
    out.sparsity = s;
    scores.sparsity_attained = true;

    out.w = soft_threshold_weights(gamma, 0.0);
    if (l1(out.w) <= s) {
        scores.delta = 0.0;
        return out;
    }

    // L1 of the normalised weights is non-increasing in delta; keep hi on the feasible side.
    double lo = 0.0;
    double hi = top;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const auto w = soft_threshold_weights(gamma, mid);
        if (l1(w) > s) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.w = soft_threshold_weights(gamma, hi);
    if (hi >= top) {
        // Only the tied maxima survive at the limit; their uniform vector is as sparse as it gets.
        std::size_t ties = 0;
        for (double g : gamma) ties += g == top ? 1 : 0;
        for (std::size_t j = 0; j < gamma.size(); ++j) {
            out.w[j] = gamma[j] == top ? 1.0 / std::sqrt(static_cast<double>(ties)) : 0.0;
        }
        scores.sparsity_attained = l1(out.w) <= s + 1e-12;
    }
    scores.delta = hi;
    return out;
}

}  // namespace pcskm
