// Copyright percep-hash contributors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "percep/imaging.hpp"

namespace percep {

/// Decode failure; `kind` distinguishes the causes, the message names the path.
struct PgmError : std::runtime_error {
    enum class Kind { OpenFailed, BadMagic, BadHeader, UnsupportedMaxval, Truncated, WriteFailed };

    PgmError(Kind k, const std::filesystem::path& path, const std::string& what)
        : std::runtime_error(what + ": " + path.string()), kind(k) {}

    Kind kind;
};

struct DatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One dataset entry; the subject id is the filename stem.
struct SubjectImage {
    std::string subject_id;
    GrayImage image;
    std::filesystem::path source_path;
};

namespace detail {

// Next whitespace-delimited header token, skipping '#' comment lines.
inline bool pgm_token(std::istream& in, std::string& tok) {
    tok.clear();
    int ch;
    while ((ch = in.get()) != EOF) {
        if (tok.empty() && ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) return true;  // the single delimiter is consumed
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return !tok.empty();
}

inline int pgm_int(std::istream& in, const std::filesystem::path& path) {
    std::string tok;
    if (!pgm_token(in, tok))
        throw PgmError(PgmError::Kind::BadHeader, path, "truncated PGM header");
    int value = 0;
    for (char c : tok) {
        if (c < '0' || c > '9')
            throw PgmError(PgmError::Kind::BadHeader, path, "malformed PGM header field '" + tok + "'");
        value = value * 10 + (c - '0');
        if (value > 1 << 30)
            throw PgmError(PgmError::Kind::BadHeader, path, "PGM header field out of range");
    }
    return value;
}

}  // namespace detail

/// Decode a binary (P5) PGM with maxval <= 255. Bytes map to v / 255.
inline GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw PgmError(PgmError::Kind::OpenFailed, path, "cannot open file");
    std::string magic;
    if (!detail::pgm_token(in, magic))
        throw PgmError(PgmError::Kind::BadMagic, path, "empty file");
    if (magic != "P5")
        throw PgmError(PgmError::Kind::BadMagic, path, "unsupported magic '" + magic + "' (want P5)");
    const int width = detail::pgm_int(in, path);
    const int height = detail::pgm_int(in, path);
    const int maxval = detail::pgm_int(in, path);
    if (width < 1 || height < 1)
        throw PgmError(PgmError::Kind::BadHeader, path, "degenerate PGM dimensions");
    if (maxval < 1 || maxval > 255)
        throw PgmError(PgmError::Kind::UnsupportedMaxval, path,
                       "maxval " + std::to_string(maxval) + " out of range (want 1..255)");
    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw PgmError(PgmError::Kind::Truncated, path, "truncated PGM payload");
    GrayImage img(width, height);
    for (std::size_t i = 0; i < raw.size(); ++i)
        img.pixels[i] = raw[i] / 255.0;
    return img;
}

/// Encode as binary (P5) PGM with maxval 255; intensity i becomes round(i * 255).
inline void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw PgmError(PgmError::Kind::WriteFailed, path, "cannot open file for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raw(img.pixels.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = static_cast<unsigned char>(
            std::lround(std::clamp(img.pixels[i], 0.0, 1.0) * 255.0));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out)
        throw PgmError(PgmError::Kind::WriteFailed, path, "write failed");
}

/// Load every .pgm in a directory, subject id = filename stem, sorted.
inline std::vector<SubjectImage> load_dataset(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw DatasetError("dataset directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.stem() < b.stem(); });
    std::vector<SubjectImage> subjects;
    subjects.reserve(files.size());
    for (const fs::path& file : files) {
        std::string stem = file.stem().string();
        if (!subjects.empty() && subjects.back().subject_id == stem)
            throw DatasetError("duplicate subject id '" + stem + "' in " + dir.string());
        subjects.push_back({std::move(stem), read_pgm(file), file});
    }
    return subjects;
}

/// Parameters of the deterministic stand-in corpus.
struct SyntheticSpec {
    int n_subjects = 28;
    int width = 192;
    int height = 168;
    std::uint64_t seed = 2;
};

namespace detail {

// splitmix64; the constants are fixed so every build reproduces the corpus
// byte for byte.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

inline double smoothstep(double edge0, double edge1, double x) {
    const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

inline void quantize8(GrayImage& img) {
    for (double& v : img.pixels)
        v = std::lround(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
}

}  // namespace detail

/// Deterministic synthetic face-like corpus: a low-frequency grating
/// background, a bright elliptical head with eye and mouth blobs, and a dark
/// shoulder band. Per-subject parameters come from one splitmix64 stream, so
/// a spec maps to exactly one set of files.
inline std::vector<SubjectImage> generate_synthetic(const SyntheticSpec& spec,
                                                    const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    if (spec.n_subjects < 1)
        throw std::invalid_argument("generate_synthetic: need at least one subject");
    if (spec.width < 32 || spec.height < 32)
        throw std::invalid_argument("generate_synthetic: dimensions must be at least 32x32");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw DatasetError("cannot create output directory: " + out_dir.string());

    const int W = spec.width;
    const int H = spec.height;
    int id_digits = 2;
    for (int n = spec.n_subjects; n >= 100; n /= 10) ++id_digits;

    detail::SplitMix64 rng(spec.seed);
    std::vector<SubjectImage> subjects;
    subjects.reserve(static_cast<std::size_t>(spec.n_subjects));
    for (int k = 0; k < spec.n_subjects; ++k) {
        // Four gratings: two axis-aligned, one oblique with a random diagonal
        // sign, one low axis-aligned. Frequencies stay below the Nyquist rate
        // of the coarsest hash grid (8x4 cells) and inside the leading zigzag
        // band, so the rotation attacks scramble both hashes.
        double amp[4], fx[4], fy[4], phase[4];
        for (int g = 0; g < 4; ++g) {
            amp[g] = g < 2 ? rng.uniform(0.15, 0.20) : rng.uniform(0.14, 0.19);
            phase[g] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        }
        fx[0] = rng.uniform(2.0, 3.6); fy[0] = rng.uniform(0.0, 0.4);
        fx[1] = rng.uniform(0.0, 0.4); fy[1] = rng.uniform(1.0, 1.9);
        fx[2] = rng.uniform(0.8, 2.2); fy[2] = rng.uniform(0.8, 1.8);
        if (rng.next() & 1) fy[2] = -fy[2];
        if (rng.next() & 1) {
            fx[3] = rng.uniform(0.6, 1.6); fy[3] = rng.uniform(0.0, 0.4);
        } else {
            fx[3] = rng.uniform(0.0, 0.4); fy[3] = rng.uniform(0.5, 1.3);
        }

        const double base = rng.uniform(0.36, 0.48);
        const double head_cx = W * rng.uniform(0.36, 0.64);
        const double head_cy = H * rng.uniform(0.30, 0.54);
        const double head_rx = W * rng.uniform(0.12, 0.16);
        const double head_ry = H * rng.uniform(0.20, 0.27);
        const double head_tone = rng.uniform(0.54, 0.68);
        const double eye_dx = head_rx * rng.uniform(0.38, 0.52);
        const double eye_dy = head_ry * rng.uniform(0.22, 0.34);
        const double eye_r = std::min(W, H) * rng.uniform(0.05, 0.09);
        const double eye_tone = rng.uniform(0.0, 0.12);
        const double mouth_dy = head_ry * rng.uniform(0.38, 0.55);
        const double mouth_rx = head_rx * rng.uniform(0.40, 0.60);
        const double mouth_ry = eye_r * rng.uniform(0.35, 0.60);
        const double mouth_tone = rng.uniform(0.05, 0.22);

        GrayImage img(W, H);
        const auto blob = [](double x, double y, double cx, double cy, double rx, double ry) {
            const double nx = (x - cx) / rx;
            const double ny = (y - cy) / ry;
            return nx * nx + ny * ny;  // < 1 inside the ellipse
        };
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                double grating = 0.0;
                for (int g = 0; g < 4; ++g)
                    grating += amp[g] * std::cos(2.0 * std::numbers::pi *
                                                     (fx[g] * x / W + fy[g] * y / H) +
                                                 phase[g]);
                double v = base + grating;
                const double head = detail::smoothstep(1.0, 0.85, blob(x, y, head_cx, head_cy, head_rx, head_ry));
                // the gratings shade the face as well (harsh lighting), so a
                // rotated face is not an untextured bright anchor
                v = v + head * (head_tone + 0.8 * grating - v);
                const double eyes = std::max(
                    detail::smoothstep(1.0, 0.6, blob(x, y, head_cx - eye_dx, head_cy - eye_dy, eye_r, eye_r)),
                    detail::smoothstep(1.0, 0.6, blob(x, y, head_cx + eye_dx, head_cy - eye_dy, eye_r, eye_r)));
                v = v + head * eyes * (eye_tone - v);
                const double mouth = detail::smoothstep(
                    1.0, 0.6, blob(x, y, head_cx, head_cy + mouth_dy, mouth_rx, mouth_ry));
                v = v + head * mouth * (mouth_tone - v);
                img.at(x, y) = std::clamp(v, 0.0, 1.0);
            }
        detail::quantize8(img);

        std::string num = std::to_string(k + 1);
        if (static_cast<int>(num.size()) < id_digits)
            num.insert(0, static_cast<std::size_t>(id_digits) - num.size(), '0');
        const std::string stem = "subj" + num;
        const fs::path file = out_dir / (stem + ".pgm");
        write_pgm(img, file);
        subjects.push_back({stem, std::move(img), file});
    }
    return subjects;
}

}  // namespace percep
