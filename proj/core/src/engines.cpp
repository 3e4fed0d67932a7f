#include "pcskm/engines.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "pcskm/error.hpp"
#include "penalties.hpp"

namespace pcskm {
namespace {

void check_inputs(const DataMatrix& m, const InitResult& init) {
    const std::size_t k = init.centroids.rows();
    if (k < 1) throw DataError("initialisation produced no centroids");
    if (k > m.n()) {
        throw DataError("K = " + std::to_string(k) + " exceeds the " + std::to_string(m.n()) + " data points");
    }
    if (init.centroids.cols() != m.p()) {
        throw DataError("centroids have " + std::to_string(init.centroids.cols()) + " features, data has " +
                        std::to_string(m.p()));
    }
}

void check_constraints(const DataMatrix& m, const ConstraintSet& constraints) {
    if (!constraints.empty() && constraints.point_count() != m.n()) {
        throw DataError("constraint set covers " + std::to_string(constraints.point_count()) +
                        " points, data has " + std::to_string(m.n()));
    }
}

void check_sparsity(double s, std::size_t p) {
    if (!(s >= 1.0) || s > std::sqrt(static_cast<double>(p)) + 1e-12) {
        throw ConfigError("sparsity " + std::to_string(s) + " outside [1, sqrt(p)] for p = " + std::to_string(p));
    }
}

// Only CANNOT-LINK penalties read the maximally separated pair.
MaxSeparatedPair pair_for(const DataMatrix& m, const ConstraintSet& constraints) {
    if (constraints.count(ConstraintKind::cannot_link) > 0) return max_separated_pair(m);
    MaxSeparatedPair none;
    none.per_feature_gap.assign(m.p(), 0.0);
    return none;
}

double sse(const DataMatrix& m, const Assignment& assignment, const Matrix& centroids, std::span<const double> w) {
    double total = 0.0;
    for (std::size_t i = 0; i < m.n(); ++i) {
        total += weighted_squared_distance(m.row(i), centroids.row(static_cast<std::size_t>(assignment[i])), w);
    }
    return total;
}

double violation_total(const DataMatrix& m, const ConstraintSet& constraints, const Assignment& assignment,
                       std::span<const double> w, const MaxSeparatedPair& pair) {
    if (constraints.empty()) return 0.0;
    const auto cost = detail::violation_costs(m, constraints, w, pair);
    double total = 0.0;
    const auto& all = constraints.constraints();
    for (std::size_t c = 0; c < all.size(); ++c) {
        const int a = assignment[all[c].i];
        const int b = assignment[all[c].j];
        const bool broken = all[c].kind == ConstraintKind::must_link ? a != b : a == b;
        if (broken) total += cost[c];
    }
    return total;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

// Alternates `assign` and centroid means until a sweep changes nothing or the step budget runs
// out. `assignment` carries over between calls so constrained sweeps see earlier placements.
template <class Assign, class AfterStep>
void lloyd_loop(const DataMatrix& m, std::span<const double> w, ClusterModel& model, int max_steps, Assign assign,
                AfterStep after_step) {
    const std::size_t k = model.centroids.rows();
    for (int step = 0; step < max_steps; ++step) {
        Assignment next = assign(model.centroids, model.assignment);
        if (next == model.assignment) break;
        model.assignment = std::move(next);
        model.centroids = update_centroids(m, model.assignment, k, w);
        ++model.iterations;
        after_step();
    }
}

ClusterModel start_model(const DataMatrix& m, const InitResult& init) {
    ClusterModel model;
    model.centroids = init.centroids;
    model.assignment.assign(m.n(), kUnassigned);
    return model;
}

double relative_weight_change(std::span<const double> next, std::span<const double> prev) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) {
        num += std::abs(next[j] - prev[j]);
        den += prev[j];
    }
    return den > 0.0 ? num / den : num;
}

// Shared outer loop of SKM and PCSKM. With an empty constraint set both paths perform the same
// floating-point operations in the same order.
WeightedModel sparse_kmeans(const DataMatrix& m, const InitResult& init, double s, const ConstraintSet& constraints,
                            const ConvergenceConfig& cfg, bool constrained) {
    check_inputs(m, init);
    check_sparsity(s, m.p());
    cfg.validate();
    const auto pair = pair_for(m, constraints);

    ClusterModel model = start_model(m, init);
    FeatureWeights weights;
    weights.w.assign(m.p(), 1.0 / std::sqrt(static_cast<double>(m.p())));
    weights.regime = WeightRegime::sparse_l1l2;
    weights.sparsity = s;

    for (int outer = 0; outer < cfg.max_outer_iterations; ++outer) {
        const std::span<const double> w = weights.w;
        if (constrained) {
            lloyd_loop(
                m, w, model, cfg.max_lloyd_iterations,
                [&](const Matrix& c, const Assignment& cur) { return assign_pckm(m, c, constraints, cur, w, pair); },
                [] {});
        } else {
            lloyd_loop(
                m, w, model, cfg.max_lloyd_iterations,
                [&](const Matrix& c, const Assignment&) { return assign_lloyd(m, c, w); }, [] {});
        }

        auto scores = constrained ? per_feature_penalized_bcss(m, model.assignment, model.centroids, constraints, pair)
                                  : per_feature_bcss(m, model.assignment, model.centroids);
        auto next = update_weights(scores, s);
        model.objective = dot(next.w, scores.gamma);
        model.objective_trace.push_back(model.objective);
        ++model.outer_iterations;

        const double change = relative_weight_change(next.w, weights.w);
        weights = std::move(next);
        if (change < cfg.epsilon) break;
    }
    model.cluster_sizes = cluster_sizes(model.assignment, model.centroids.rows());
    return {std::move(model), std::move(weights)};
}

// Closed-form diagonal metric: a_j = n / (WCSS_j + violated ML f_j + violated CL fbar_j).
std::vector<double> metric_update(const DataMatrix& m, const ClusterModel& model, const ConstraintSet& constraints,
                                  const MaxSeparatedPair& pair, std::size_t& capped) {
    std::vector<double> denom(m.p(), 0.0);
    for (std::size_t i = 0; i < m.n(); ++i) {
        const auto c = static_cast<std::size_t>(model.assignment[i]);
        for (std::size_t j = 0; j < m.p(); ++j) {
            const double d = m(i, j) - model.centroids(c, j);
            denom[j] += d * d;
        }
    }
    for (const auto& c : constraints.constraints()) {
        const int a = model.assignment[c.i];
        const int b = model.assignment[c.j];
        const bool broken = c.kind == ConstraintKind::must_link ? a != b : a == b;
        if (!broken) continue;
        for (std::size_t j = 0; j < m.p(); ++j) {
            const double d = m(c.i, j) - m(c.j, j);
            denom[j] += c.cost * (c.kind == ConstraintKind::must_link ? d * d : pair.per_feature_gap[j] - d * d);
        }
    }
    capped = 0;
    std::vector<double> a(m.p());
    const double n = static_cast<double>(m.n());
    for (std::size_t j = 0; j < m.p(); ++j) {
        const double v = denom[j] > 0.0 ? n / denom[j] : kMetricWeightCap;
        if (!(v < kMetricWeightCap)) {
            a[j] = kMetricWeightCap;
            ++capped;
        } else {
            a[j] = v;
        }
    }
    return a;
}

double mpckm_objective(const DataMatrix& m, const ClusterModel& model, std::span<const double> a,
                       const ConstraintSet& constraints, const MaxSeparatedPair& pair) {
    double log_det = 0.0;
    for (double v : a) log_det += std::log(v);
    return sse(m, model.assignment, model.centroids, a) - static_cast<double>(m.n()) * log_det +
           violation_total(m, constraints, model.assignment, a, pair);
}

}  // namespace

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::lkm: return "LKM";
        case Algorithm::skm: return "SKM";
        case Algorithm::pckm: return "PCKM";
        case Algorithm::mpckm: return "MPCKM";
        case Algorithm::pcskm: return "PCSKM";
    }
    return "LKM";
}

Algorithm parse_algorithm(std::string_view name) {
    std::string up(name);
    for (auto& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (up == "LKM" || up == "KM") return Algorithm::lkm;
    if (up == "SKM") return Algorithm::skm;
    if (up == "PCKM") return Algorithm::pckm;
    if (up == "MPCKM") return Algorithm::mpckm;
    if (up == "PCSKM") return Algorithm::pcskm;
    throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

bool is_sparse(Algorithm a) noexcept { return a == Algorithm::skm || a == Algorithm::pcskm; }

ClusterModel run_lkm(const DataMatrix& m, const InitResult& init, const ConvergenceConfig& cfg) {
    check_inputs(m, init);
    cfg.validate();
    const std::vector<double> ones(m.p(), 1.0);
    ClusterModel model = start_model(m, init);
    lloyd_loop(
        m, ones, model, cfg.max_lloyd_iterations,
        [&](const Matrix& c, const Assignment&) { return assign_lloyd(m, c, ones); },
        [&] { model.objective_trace.push_back(sse(m, model.assignment, model.centroids, ones)); });
    model.outer_iterations = 1;
    model.objective = sse(m, model.assignment, model.centroids, ones);
    model.cluster_sizes = cluster_sizes(model.assignment, model.centroids.rows());
    return model;
}

ClusterModel run_pckm(const DataMatrix& m, const InitResult& init, const ConstraintSet& constraints,
                      const ConvergenceConfig& cfg) {
    check_inputs(m, init);
    check_constraints(m, constraints);
    cfg.validate();
    const std::vector<double> ones(m.p(), 1.0);
    const auto pair = pair_for(m, constraints);
    ClusterModel model = start_model(m, init);
    auto objective = [&] {
        return sse(m, model.assignment, model.centroids, ones) +
               violation_total(m, constraints, model.assignment, ones, pair);
    };
    lloyd_loop(
        m, ones, model, cfg.max_lloyd_iterations,
        [&](const Matrix& c, const Assignment& cur) { return assign_pckm(m, c, constraints, cur, ones, pair); },
        [&] { model.objective_trace.push_back(objective()); });
    model.outer_iterations = 1;
    model.objective = objective();
    model.cluster_sizes = cluster_sizes(model.assignment, model.centroids.rows());
    return model;
}

WeightedModel run_mpckm(const DataMatrix& m, const InitResult& init, const ConstraintSet& constraints,
                        const ConvergenceConfig& cfg) {
    check_inputs(m, init);
    check_constraints(m, constraints);
    cfg.validate();
    const auto pair = pair_for(m, constraints);
    ClusterModel model = start_model(m, init);
    FeatureWeights weights = FeatureWeights::uniform(m.p(), 1.0);
    weights.regime = WeightRegime::metric_diagonal;

    const std::size_t k = model.centroids.rows();
    for (int step = 0; step < cfg.max_lloyd_iterations; ++step) {
        Assignment next = assign_pckm(m, model.centroids, constraints, model.assignment, weights.w, pair);
        if (next == model.assignment) break;
        model.assignment = std::move(next);
        model.centroids = update_centroids(m, model.assignment, k, weights.w);
        weights.w = metric_update(m, model, constraints, pair, weights.capped);
        ++model.iterations;
        model.objective_trace.push_back(mpckm_objective(m, model, weights.w, constraints, pair));
    }
    model.outer_iterations = 1;
    model.objective = mpckm_objective(m, model, weights.w, constraints, pair);
    model.cluster_sizes = cluster_sizes(model.assignment, k);
    return {std::move(model), std::move(weights)};
}

WeightedModel run_skm(const DataMatrix& m, const InitResult& init, double s, const ConvergenceConfig& cfg) {
    return sparse_kmeans(m, init, s, ConstraintSet(m.n()), cfg, false);
}

WeightedModel run_pcskm(const DataMatrix& m, const InitResult& init, double s, const ConstraintSet& constraints,
                        const ConvergenceConfig& cfg) {
    check_constraints(m, constraints);
    return sparse_kmeans(m, init, s, constraints, cfg, true);
}

WeightedModel run_algorithm(Algorithm algorithm, const DataMatrix& m, const InitResult& init,
                            const ConstraintSet& constraints, double s, const ConvergenceConfig& cfg) {
    switch (algorithm) {
        case Algorithm::lkm: return {run_lkm(m, init, cfg), FeatureWeights::uniform(m.p())};
        case Algorithm::pckm: return {run_pckm(m, init, constraints, cfg), FeatureWeights::uniform(m.p())};
        case Algorithm::mpckm: return run_mpckm(m, init, constraints, cfg);
        case Algorithm::skm: return run_skm(m, init, s, cfg);
        case Algorithm::pcskm: return run_pcskm(m, init, s, constraints, cfg);
    }
    throw ConfigError("unknown algorithm");
}

double objective_value(const DataMatrix& m, const ClusterModel& model, const FeatureWeights& weights,
                       const ConstraintSet& constraints, Algorithm algorithm) {
    const std::vector<double> ones(m.p(), 1.0);
    switch (algorithm) {
        case Algorithm::lkm: return sse(m, model.assignment, model.centroids, ones);
        case Algorithm::skm: return dot(weights.w, per_feature_bcss(m, model.assignment, model.centroids).gamma);
        case Algorithm::pckm: {
            const auto pair = pair_for(m, constraints);
            return sse(m, model.assignment, model.centroids, ones) +
                   violation_total(m, constraints, model.assignment, ones, pair);
        }
        case Algorithm::mpckm: return mpckm_objective(m, model, weights.w, constraints, pair_for(m, constraints));
        case Algorithm::pcskm: {
            const auto pair = pair_for(m, constraints);
            return dot(weights.w,
                       per_feature_penalized_bcss(m, model.assignment, model.centroids, constraints, pair).gamma);
        }
    }
    throw ConfigError("unknown algorithm");
}

}  // namespace pcskm
