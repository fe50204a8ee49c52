// Copyright percep-hash contributors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "percep/imaging.hpp"

namespace percep {

enum class HashKind { Average, Dct };

inline const char* kind_name(HashKind k) {
    return k == HashKind::Average ? "avg" : "dct";
}

inline HashKind parse_kind(std::string_view s) {
    if (s == "avg") return HashKind::Average;
    if (s == "dct") return HashKind::Dct;
    throw std::invalid_argument("unknown hash kind: " + std::string(s));
}

/// Thrown when two hashes of different width or kind are compared.
struct IncompatibleHashError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Fixed-width perceptual hash value.
///
/// Emission bit i lives at position (bits - 1 - i) of `value`, i.e. the bit
/// vector is packed MSB-first. The canonical text form is
/// `<kind>:<bits>:<hex>` with bits/4 lowercase hex digits, so bit 0 is the
/// most significant bit of the first digit.
struct BitHash {
    HashKind kind = HashKind::Average;
    int bits = 64;
    std::uint64_t value = 0;

    bool bit(int i) const { return (value >> (bits - 1 - i)) & 1u; }

    bool operator==(const BitHash&) const = default;
};

/// Pipeline selector: hash family, width, and the optional pre-hash blur
/// that distinguishes the GB variant from the baseline.
struct HashConfig {
    HashKind kind = HashKind::Average;
    int bits = 64;
    std::optional<double> preblur_sigma;  // absent = baseline variant

    bool operator==(const HashConfig&) const = default;
};

namespace detail {

inline void check_bits(int bits) {
    if (bits != 32 && bits != 64)
        throw std::invalid_argument("hash width must be 32 or 64");
}

}  // namespace detail

inline std::string to_string(const BitHash& h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s:%d:%0*llx", kind_name(h.kind), h.bits,
                  h.bits / 4, static_cast<unsigned long long>(h.value));
    return buf;
}

inline BitHash parse_hash(std::string_view s) {
    const auto c1 = s.find(':');
    const auto c2 = (c1 == std::string_view::npos) ? c1 : s.find(':', c1 + 1);
    if (c2 == std::string_view::npos)
        throw std::invalid_argument("malformed hash: " + std::string(s));
    BitHash h;
    h.kind = parse_kind(s.substr(0, c1));
    const std::string_view bits_str = s.substr(c1 + 1, c2 - c1 - 1);
    if (bits_str == "32") h.bits = 32;
    else if (bits_str == "64") h.bits = 64;
    else throw std::invalid_argument("malformed hash width: " + std::string(s));
    const std::string_view hex = s.substr(c2 + 1);
    if (hex.size() != static_cast<std::size_t>(h.bits / 4))
        throw std::invalid_argument("malformed hash digits: " + std::string(s));
    std::uint64_t v = 0;
    for (char ch : hex) {
        int d;
        if (ch >= '0' && ch <= '9') d = ch - '0';
        else if (ch >= 'a' && ch <= 'f') d = ch - 'a' + 10;
        else if (ch >= 'A' && ch <= 'F') d = ch - 'A' + 10;
        else throw std::invalid_argument("malformed hash digits: " + std::string(s));
        v = (v << 4) | static_cast<std::uint64_t>(d);
    }
    h.value = v;
    return h;
}

/// Average hash: resample to an 8x8 (64-bit) or 8x4 (32-bit) grid and set a
/// bit for every cell at or above the grid mean, row-major.
inline BitHash average_hash(const GrayImage& img, int bits) {
    detail::check_bits(bits);
    const int gw = 8;
    const int gh = bits / 8;  // 64 -> 8 rows, 32 -> 4 rows
    const GrayImage grid = resize_area(img, gw, gh);
    const double mean = detail::mean(grid.pixels);
    std::uint64_t v = 0;
    int i = 0;
    for (int y = 0; y < gh; ++y)
        for (int x = 0; x < gw; ++x, ++i)
            if (grid.at(x, y) >= mean) v |= std::uint64_t{1} << (bits - 1 - i);
    return {HashKind::Average, bits, v};
}

/// Zigzag traversal of an R x C grid from the DC corner, low frequencies
/// first (JPEG convention: even anti-diagonals walk up-right).
inline std::vector<std::pair<int, int>> zigzag_order(int rows, int cols) {
    std::vector<std::pair<int, int>> order;
    order.reserve(static_cast<std::size_t>(rows) * cols);
    for (int d = 0; d <= rows + cols - 2; ++d) {
        const int r_lo = std::max(0, d - cols + 1);
        const int r_hi = std::min(d, rows - 1);
        if (d % 2 == 0) {
            for (int r = r_hi; r >= r_lo; --r) order.emplace_back(r, d - r);
        } else {
            for (int r = r_lo; r <= r_hi; ++r) order.emplace_back(r, d - r);
        }
    }
    return order;
}

/// DCT hash: resample to 32x32, take the first `bits` AC coefficients in
/// zigzag order (DC skipped), and set a bit for every coefficient strictly
/// above their median.
inline BitHash dct_hash(const GrayImage& img, int bits) {
    detail::check_bits(bits);
    const GrayImage grid = resize_area(img, 32, 32);
    CoeffMatrix m(32, 32, grid.pixels);
    // Centering changes only the DC term, which the hash skips; it keeps the
    // AC coefficients of flat images at exactly zero.
    const double mean = detail::mean(m.values);
    for (double& v : m.values) v -= mean;
    const CoeffMatrix spectrum = dct2(m);

    static const std::vector<std::pair<int, int>> order = zigzag_order(32, 32);
    std::vector<double> coeffs(static_cast<std::size_t>(bits));
    for (int i = 0; i < bits; ++i) {
        const auto [r, c] = order[static_cast<std::size_t>(i) + 1];  // skip DC at order[0]
        coeffs[i] = spectrum.at(r, c);
    }
    std::vector<double> sorted = coeffs;
    std::sort(sorted.begin(), sorted.end());
    const double median = (sorted[bits / 2 - 1] + sorted[bits / 2]) / 2.0;

    std::uint64_t v = 0;
    for (int i = 0; i < bits; ++i)
        if (coeffs[i] > median) v |= std::uint64_t{1} << (bits - 1 - i);
    return {HashKind::Dct, bits, v};
}

/// Run the configured pipeline: optional Gaussian pre-blur, then the hash.
inline BitHash hash_with_config(const GrayImage& img, const HashConfig& cfg) {
    if (!cfg.preblur_sigma.has_value())
        return cfg.kind == HashKind::Average ? average_hash(img, cfg.bits)
                                             : dct_hash(img, cfg.bits);
    const GrayImage blurred = gaussian_blur(img, *cfg.preblur_sigma);
    return cfg.kind == HashKind::Average ? average_hash(blurred, cfg.bits)
                                         : dct_hash(blurred, cfg.bits);
}

/// Number of differing bit positions between two equal-shape hashes.
inline int hamming(const BitHash& a, const BitHash& b) {
    if (a.bits != b.bits || a.kind != b.kind)
        throw IncompatibleHashError("hamming: hashes differ in kind or width");
    return std::popcount(a.value ^ b.value);
}

}  // namespace percep
