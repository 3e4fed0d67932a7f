#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "pcskm/matrix.hpp"

namespace testutil {

// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("pcskm_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

    std::filesystem::path write(const std::string& name, const std::string& text) const {
        auto p = path_ / name;
        std::ofstream(p) << text;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline pcskm::DataMatrix column(const std::vector<double>& xs) {
    return pcskm::DataMatrix(xs.size(), 1, xs);
}

// Gaussian blobs with well separated means; used by property tests.
inline pcskm::DataMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t p) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> blob(0, 3);
    std::vector<double> v(n * p);
    for (std::size_t i = 0; i < n; ++i) {
        const int b = blob(rng);
        for (std::size_t j = 0; j < p; ++j) v[i * p + j] = g(rng) + 4.0 * ((b + static_cast<int>(j)) % 3);
    }
    return pcskm::DataMatrix(n, p, std::move(v));
}

}  // namespace testutil
