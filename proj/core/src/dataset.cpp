#include "pcskm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>

#include "pcskm/error.hpp"
#include "pcskm/random.hpp"

namespace pcskm {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(FeatureQuality q) noexcept {
    switch (q) {
        case FeatureQuality::informative: return "informative";
        case FeatureQuality::uninformative: return "uninformative";
        case FeatureQuality::unknown: return "unknown";
    }
    return "unknown";
}

void LabeledDataset::validate() const {
    if (labels) {
        if (labels->size() != matrix.n()) {
            throw DataError("labels have length " + std::to_string(labels->size()) + ", expected " +
                            std::to_string(matrix.n()));
        }
        for (int id : *labels) {
            if (id < 0 || id >= class_count) {
                throw DataError("label " + std::to_string(id) + " outside 0.." +
                                std::to_string(class_count - 1));
            }
        }
    }
    if (feature_truth && feature_truth->size() != matrix.p()) {
        throw DataError("feature_truth has length " + std::to_string(feature_truth->size()) +
                        ", expected " + std::to_string(matrix.p()));
    }
}

LabeledDataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        for (auto f : split_fields(line)) header.emplace_back(f);
        break;
    }
    if (header.empty()) throw DataError(path.string() + ": missing header row");

    std::optional<std::size_t> label_idx;
    if (label_column) {
        const auto it = std::find(header.begin(), header.end(), *label_column);
        if (it == header.end()) {
            throw DataError(path.string() + ": label column '" + *label_column + "' not in header");
        }
        label_idx = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != label_idx) feature_names.push_back(header[c]);
    }
    if (feature_names.empty()) throw DataError(path.string() + ": no feature columns");

    std::vector<double> values;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::unordered_map<std::string, int> class_ids;
    std::size_t rows = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == label_idx) {
                std::string key(fields[c]);
                auto [it, inserted] = class_ids.try_emplace(key, static_cast<int>(class_names.size()));
                if (inserted) class_names.push_back(key);
                labels.push_back(it->second);
                continue;
            }
            const auto v = parse_double(fields[c]);
            if (!v || !std::isfinite(*v)) {
                throw DataError(path.string() + ":" + std::to_string(line_no) + ": column " +
                                std::to_string(c + 1) + " ('" + header[c] + "') value '" +
                                std::string(fields[c]) + "' is not a finite number");
            }
            values.push_back(*v);
        }
        ++rows;
    }
    if (rows == 0) throw DataError(path.string() + ": no data rows");

    LabeledDataset ds{DataMatrix(rows, feature_names.size(), std::move(values))};
    ds.feature_names = std::move(feature_names);
    if (label_idx) {
        ds.labels = std::move(labels);
        ds.class_count = static_cast<int>(class_names.size());
        ds.class_names = std::move(class_names);
    }
    return ds;
}

void write_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
    ds.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());

    const std::size_t p = ds.matrix.p();
    for (std::size_t j = 0; j < p; ++j) {
        if (j) out << ',';
        out << (j < ds.feature_names.size() ? ds.feature_names[j] : "f" + std::to_string(j + 1));
    }
    if (ds.labels) out << ",class";
    out << '\n';

    for (std::size_t i = 0; i < ds.matrix.n(); ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            if (j) out << ',';
            out << format_double(ds.matrix(i, j));
        }
        if (ds.labels) {
            const int id = (*ds.labels)[i];
            out << ','
                << (static_cast<std::size_t>(id) < ds.class_names.size() ? ds.class_names[id]
                                                                         : std::to_string(id));
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed for " + path.string());
}

std::vector<double> global_centroid(const DataMatrix& m) {
    std::vector<double> mu(m.p(), 0.0);
    for (std::size_t i = 0; i < m.n(); ++i) {
        for (std::size_t j = 0; j < m.p(); ++j) mu[j] += m(i, j);
    }
    for (auto& v : mu) v /= static_cast<double>(m.n());
    return mu;
}

DataMatrix standardize(const DataMatrix& m) {
    const auto mu = global_centroid(m);
    std::vector<double> sd(m.p(), 0.0);
    for (std::size_t i = 0; i < m.n(); ++i) {
        for (std::size_t j = 0; j < m.p(); ++j) {
            const double d = m(i, j) - mu[j];
            sd[j] += d * d;
        }
    }
    const double denom = m.n() > 1 ? static_cast<double>(m.n() - 1) : 1.0;
    for (auto& v : sd) v = std::sqrt(v / denom);

    Matrix out(m.n(), m.p());
    for (std::size_t i = 0; i < m.n(); ++i) {
        for (std::size_t j = 0; j < m.p(); ++j) {
            const double centered = m(i, j) - mu[j];
            out(i, j) = sd[j] > 0.0 ? centered / sd[j] : centered;
        }
    }
    return DataMatrix(std::move(out));
}

MaxSeparatedPair max_separated_pair(const DataMatrix& m) {
    if (m.n() < 2) throw DataError("maximally separated pair needs at least two points");
    MaxSeparatedPair best{0, 1, {}};
    double best_d = -1.0;
    for (std::size_t i = 0; i + 1 < m.n(); ++i) {
        for (std::size_t j = i + 1; j < m.n(); ++j) {
            const double d = squared_distance(m.row(i), m.row(j));
            if (d > best_d) {
                best_d = d;
                best.first = i;
                best.second = j;
            }
        }
    }
    best.per_feature_gap.resize(m.p());
    for (std::size_t j = 0; j < m.p(); ++j) {
        const double d = m(best.first, j) - m(best.second, j);
        best.per_feature_gap[j] = d * d;
    }
    return best;
}

LabeledDataset generate_brodinova(const BrodinovaParams& params, std::uint64_t seed) {
    if (params.clusters < 2) throw ConfigError("brodinova: clusters must be >= 2");
    if (params.per_cluster < 1) throw ConfigError("brodinova: per_cluster must be >= 1");
    if (params.informative < 1) throw ConfigError("brodinova: informative must be >= 1");
    if (params.uninformative < 0) throw ConfigError("brodinova: uninformative must be >= 0");
    if (!(params.separation > 0.0)) throw ConfigError("brodinova: separation must be positive");

    const auto k = static_cast<std::size_t>(params.clusters);
    const auto per = static_cast<std::size_t>(params.per_cluster);
    const auto inf = static_cast<std::size_t>(params.informative);
    const auto p = inf + static_cast<std::size_t>(params.uninformative);
    const std::size_t n = k * per;

    // Each informative axis places the K cluster means on a cyclic shift of
    // {0, sep, ..., (K-1) sep}, so every informative feature separates every cluster pair.
    Rng rng(seed);
    Matrix values(n, p);
    std::vector<int> labels(n);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t r = 0; r < per; ++r) {
            const std::size_t i = c * per + r;
            labels[i] = static_cast<int>(c);
            for (std::size_t j = 0; j < p; ++j) {
                const double mean =
                    j < inf ? params.separation * static_cast<double>((c + j) % k) : 0.0;
                values(i, j) = mean + standard_normal(rng);
            }
        }
    }

    LabeledDataset ds{DataMatrix(std::move(values))};
    ds.labels = std::move(labels);
    ds.class_count = params.clusters;
    std::vector<FeatureQuality> truth(p, FeatureQuality::uninformative);
    std::fill_n(truth.begin(), inf, FeatureQuality::informative);
    ds.feature_truth = std::move(truth);
    for (std::size_t j = 0; j < p; ++j) ds.feature_names.push_back("f" + std::to_string(j + 1));
    for (std::size_t c = 0; c < k; ++c) ds.class_names.push_back("cluster" + std::to_string(c));
    return ds;
}

LabeledDataset contaminate_exponential(const LabeledDataset& ds, int count, double rate, std::uint64_t seed) {
    if (count < 1) throw ConfigError("contaminate: count must be >= 1");
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("contaminate: rate must be positive");

    const std::size_t n = ds.matrix.n();
    const std::size_t p = ds.matrix.p();
    const auto extra = static_cast<std::size_t>(count);
    Rng rng(seed);
    Matrix values(n, p + extra);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) values(i, j) = ds.matrix(i, j);
    }
    // Column-major draws: column t of the appended block is generated in full before t + 1.
    for (std::size_t t = 0; t < extra; ++t) {
        for (std::size_t i = 0; i < n; ++i) values(i, p + t) = exponential(rng, rate);
    }

    LabeledDataset out{DataMatrix(std::move(values))};
    out.labels = ds.labels;
    out.class_count = ds.class_count;
    out.class_names = ds.class_names;
    auto truth = ds.feature_truth.value_or(std::vector<FeatureQuality>(p, FeatureQuality::unknown));
    truth.resize(p + extra, FeatureQuality::uninformative);
    out.feature_truth = std::move(truth);
    out.feature_names = ds.feature_names;
    out.feature_names.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        if (out.feature_names[j].empty()) out.feature_names[j] = "f" + std::to_string(j + 1);
    }
    for (std::size_t t = 0; t < extra; ++t) out.feature_names.push_back("exp" + std::to_string(t + 1));
    return out;
}

LabeledDataset subsample_classes(const LabeledDataset& ds, const std::vector<int>& classes, int per_class,
                                 std::uint64_t seed) {
    if (!ds.labels) throw DataError("subsample: dataset is unlabeled");
    if (per_class < 1) throw DataError("subsample: per_class must be >= 1");
    if (classes.empty()) throw DataError("subsample: no classes requested");
    if (std::set<int>(classes.begin(), classes.end()).size() != classes.size()) {
        throw DataError("subsample: duplicate class ids");
    }

    const auto& labels = *ds.labels;
    Rng rng(seed);
    std::map<std::size_t, int> chosen;  // row -> new label, ordered by row
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const int cls = classes[c];
        if (cls < 0 || cls >= ds.class_count) {
            throw DataError("subsample: class " + std::to_string(cls) + " does not exist");
        }
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) members.push_back(i);
        }
        if (members.size() < static_cast<std::size_t>(per_class)) {
            throw DataError("subsample: class " + std::to_string(cls) + " has " +
                            std::to_string(members.size()) + " members, " + std::to_string(per_class) +
                            " requested");
        }
        for (std::size_t t = 0; t < static_cast<std::size_t>(per_class); ++t) {
            const auto pick = t + uniform_below(rng, members.size() - t);
            std::swap(members[t], members[pick]);
            chosen.emplace(members[t], static_cast<int>(c));
        }
    }

    const std::size_t p = ds.matrix.p();
    Matrix values(chosen.size(), p);
    std::vector<int> new_labels;
    std::size_t r = 0;
    for (const auto& [row, label] : chosen) {
        for (std::size_t j = 0; j < p; ++j) values(r, j) = ds.matrix(row, j);
        new_labels.push_back(label);
        ++r;
    }

    LabeledDataset out{DataMatrix(std::move(values))};
    out.labels = std::move(new_labels);
    out.class_count = static_cast<int>(classes.size());
    out.feature_truth = ds.feature_truth;
    out.feature_names = ds.feature_names;
    for (int cls : classes) {
        out.class_names.push_back(static_cast<std::size_t>(cls) < ds.class_names.size()
                                      ? ds.class_names[cls]
                                      : std::to_string(cls));
    }
    return out;
}

}  // namespace pcskm
