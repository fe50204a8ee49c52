// Copyright percep-hash contributors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "percep/imaging.hpp"

namespace testutil {

// Unique scratch directory, removed on scope exit.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        path = base / ("percep_" + tag + "_" + std::to_string(::getpid()) + "_" +
                       std::to_string(counter++));
        std::filesystem::create_directories(path);
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline percep::GrayImage random_image(std::mt19937_64& rng, int w, int h, double lo = 0.0,
                                      double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    percep::GrayImage img(w, h);
    for (double& p : img.pixels) p = dist(rng);
    return img;
}

inline double global_mean(const percep::GrayImage& img) {
    double sum = 0.0;
    for (double p : img.pixels) sum += p;
    return sum / static_cast<double>(img.pixels.size());
}

}  // namespace testutil
