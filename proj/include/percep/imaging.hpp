// Copyright percep-hash contributors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace percep {

/// Grayscale raster with row-major doubles in [0, 1].
///
/// 8-bit sources are mapped v/255 at decode time; everything downstream of
/// the codec stays in floating point and quantizes back to bytes only when
/// a file is written.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // row-major, pixels[y * width + x]

    GrayImage() = default;

    GrayImage(int w, int h, double fill = 0.0) : width(w), height(h) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("GrayImage: dimensions must be >= 1");
        pixels.assign(static_cast<std::size_t>(w) * h, fill);
    }

    double& at(int x, int y) {
        assert(x >= 0 && x < width && y >= 0 && y < height);
        return pixels[static_cast<std::size_t>(y) * width + x];
    }

    double at(int x, int y) const {
        assert(x >= 0 && x < width && y >= 0 && y < height);
        return pixels[static_cast<std::size_t>(y) * width + x];
    }

    bool operator==(const GrayImage&) const = default;
};

/// Symmetric odd-length convolution kernel; weights sum to 1.
struct Kernel1D {
    int radius = 0;
    std::vector<double> weights;  // 2 * radius + 1 taps
};

/// Real-valued matrix carrying DCT coefficients (or the pixels feeding them).
struct CoeffMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;  // row-major

    CoeffMatrix() = default;

    CoeffMatrix(int r, int c, double fill = 0.0) : rows(r), cols(c) {
        if (r < 1 || c < 1)
            throw std::invalid_argument("CoeffMatrix: dimensions must be >= 1");
        values.assign(static_cast<std::size_t>(r) * c, fill);
    }

    CoeffMatrix(int r, int c, std::vector<double> v)
        : rows(r), cols(c), values(std::move(v)) {
        if (r < 1 || c < 1)
            throw std::invalid_argument("CoeffMatrix: dimensions must be >= 1");
        if (values.size() != static_cast<std::size_t>(r) * c)
            throw std::invalid_argument("CoeffMatrix: value count does not match dimensions");
    }

    double& at(int r, int c) {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return values[static_cast<std::size_t>(r) * cols + c];
    }

    double at(int r, int c) const {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return values[static_cast<std::size_t>(r) * cols + c];
    }

    bool operator==(const CoeffMatrix&) const = default;
};

namespace detail {

// Pairwise reduction; summing 2^k identical values stays exact, which keeps
// mean comparisons on flat images free of last-ulp noise.
inline double pairwise_sum(std::span<const double> v) {
    switch (v.size()) {
        case 0: return 0.0;
        case 1: return v[0];
        case 2: return v[0] + v[1];
        default: break;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double mean(std::span<const double> v) {
    return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
}

// Orthonormal DCT-II basis for length n: basis[k * n + x] = alpha(k) *
// cos(pi * (2x + 1) * k / (2n)), alpha(0) = sqrt(1/n), alpha(k>0) = sqrt(2/n).
inline std::vector<double> dct_basis(int n) {
    std::vector<double> basis(static_cast<std::size_t>(n) * n);
    const double a0 = std::sqrt(1.0 / n);
    const double ak = std::sqrt(2.0 / n);
    for (int k = 0; k < n; ++k) {
        const double alpha = (k == 0) ? a0 : ak;
        for (int x = 0; x < n; ++x)
            basis[static_cast<std::size_t>(k) * n + x] =
                alpha * std::cos(std::numbers::pi * (2 * x + 1) * k / (2.0 * n));
    }
    return basis;
}

}  // namespace detail

/// ITU-R 601 luma, clamped to [0, 1].
inline double to_grayscale(double r, double g, double b) {
    return std::clamp(0.299 * r + 0.587 * g + 0.114 * b, 0.0, 1.0);
}

/// Box (area-averaging) resample to out_w x out_h.
///
/// Every destination cell takes the area-weighted mean of the source pixels
/// it overlaps under the uniform box mapping. Overlaps are computed in
/// integer units (source scaled by the destination size per axis), so cell
/// boundaries are exact for any size ratio.
inline GrayImage resize_area(const GrayImage& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1)
        throw std::invalid_argument("resize_area: target dimensions must be >= 1");
    const int sw = img.width;
    const int sh = img.height;
    GrayImage out(out_w, out_h);
    const double total_weight = static_cast<double>(sw) * static_cast<double>(sh);
    for (int oy = 0; oy < out_h; ++oy) {
        // y extent of this cell in 1/out_h units of the source grid
        const std::int64_t y_lo = static_cast<std::int64_t>(oy) * sh;
        const std::int64_t y_hi = y_lo + sh;
        const int iy0 = static_cast<int>(y_lo / out_h);
        const int iy1 = static_cast<int>((y_hi + out_h - 1) / out_h);
        for (int ox = 0; ox < out_w; ++ox) {
            const std::int64_t x_lo = static_cast<std::int64_t>(ox) * sw;
            const std::int64_t x_hi = x_lo + sw;
            const int ix0 = static_cast<int>(x_lo / out_w);
            const int ix1 = static_cast<int>((x_hi + out_w - 1) / out_w);
            double acc = 0.0;
            bool uniform = true;
            const double first = img.at(ix0, iy0);
            for (int iy = iy0; iy < iy1; ++iy) {
                const std::int64_t wy =
                    std::min<std::int64_t>(static_cast<std::int64_t>(iy + 1) * out_h, y_hi) -
                    std::max<std::int64_t>(static_cast<std::int64_t>(iy) * out_h, y_lo);
                for (int ix = ix0; ix < ix1; ++ix) {
                    const std::int64_t wx =
                        std::min<std::int64_t>(static_cast<std::int64_t>(ix + 1) * out_w, x_hi) -
                        std::max<std::int64_t>(static_cast<std::int64_t>(ix) * out_w, x_lo);
                    const double v = img.at(ix, iy);
                    uniform = uniform && v == first;
                    acc += static_cast<double>(wx * wy) * v;
                }
            }
            // A cell covering a single distinct value averages to that value
            // exactly; taking the shortcut keeps constant regions bit-stable.
            out.at(ox, oy) = uniform ? first : std::clamp(acc / total_weight, 0.0, 1.0);
        }
    }
    return out;
}

/// Normalized Gaussian taps with radius ceil(3 * sigma).
inline Kernel1D gaussian_kernel(double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("gaussian_kernel: sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    Kernel1D k;
    k.radius = radius;
    k.weights.resize(2 * static_cast<std::size_t>(radius) + 1);
    double sum = 0.0;
    for (int i = 0; i <= 2 * radius; ++i) {
        const double d = i - radius;
        k.weights[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += k.weights[i];
    }
    for (double& w : k.weights) w /= sum;
    return k;
}

/// Separable Gaussian blur (horizontal pass then vertical pass) with
/// replicated edges. Dimensions are preserved.
inline GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    const Kernel1D kernel = gaussian_kernel(sigma);
    const int r = kernel.radius;
    const int w = img.width;
    const int h = img.height;
    GrayImage tmp(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int d = -r; d <= r; ++d)
                acc += kernel.weights[d + r] * img.at(std::clamp(x + d, 0, w - 1), y);
            tmp.at(x, y) = std::clamp(acc, 0.0, 1.0);
        }
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int d = -r; d <= r; ++d)
                acc += kernel.weights[d + r] * tmp.at(x, std::clamp(y + d, 0, h - 1));
            out.at(x, y) = std::clamp(acc, 0.0, 1.0);
        }
    return out;
}

/// Orthonormal 2-D DCT-II, separable row/column evaluation.
inline CoeffMatrix dct2(const CoeffMatrix& m) {
    const int R = m.rows;
    const int C = m.cols;
    const std::vector<double> row_basis = detail::dct_basis(R);
    const std::vector<double> col_basis = detail::dct_basis(C);
    CoeffMatrix tmp(R, C);
    for (int r = 0; r < R; ++r)
        for (int v = 0; v < C; ++v) {
            double acc = 0.0;
            for (int c = 0; c < C; ++c)
                acc += m.at(r, c) * col_basis[static_cast<std::size_t>(v) * C + c];
            tmp.at(r, v) = acc;
        }
    CoeffMatrix out(R, C);
    for (int u = 0; u < R; ++u)
        for (int v = 0; v < C; ++v) {
            double acc = 0.0;
            for (int r = 0; r < R; ++r)
                acc += tmp.at(r, v) * row_basis[static_cast<std::size_t>(u) * R + r];
            out.at(u, v) = acc;
        }
    return out;
}

/// Inverse of dct2 (orthonormal DCT-III per axis).
inline CoeffMatrix idct2(const CoeffMatrix& m) {
    const int R = m.rows;
    const int C = m.cols;
    const std::vector<double> row_basis = detail::dct_basis(R);
    const std::vector<double> col_basis = detail::dct_basis(C);
    CoeffMatrix tmp(R, C);
    for (int u = 0; u < R; ++u)
        for (int c = 0; c < C; ++c) {
            double acc = 0.0;
            for (int v = 0; v < C; ++v)
                acc += m.at(u, v) * col_basis[static_cast<std::size_t>(v) * C + c];
            tmp.at(u, c) = acc;
        }
    CoeffMatrix out(R, C);
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            double acc = 0.0;
            for (int u = 0; u < R; ++u)
                acc += tmp.at(u, c) * row_basis[static_cast<std::size_t>(u) * R + r];
            out.at(r, c) = acc;
        }
    return out;
}

namespace detail {

// sin/cos pairs with near-quadrant residue snapped to zero, so canvases and
// inscribed rectangles come out exact at 0/90/180/270 degrees.
struct RotationTrig {
    double cos_a;
    double sin_a;
};

inline RotationTrig rotation_trig(double degrees) {
    const double rad = degrees * std::numbers::pi / 180.0;
    double c = std::cos(rad);
    double s = std::sin(rad);
    if (std::abs(c) < 1e-12) c = 0.0;
    if (std::abs(s) < 1e-12) s = 0.0;
    return {c, s};
}

}  // namespace detail

/// Rotate about the image center with bilinear sampling into a bounding
/// canvas that contains the whole rotated rectangle.
///
/// Destination pixels whose source sample falls outside the source rectangle
/// are black (0); samples inside it interpolate with edge-clamped taps, so no
/// fill leaks into the rotated content. 180 degrees is exact pixel reversal.
inline GrayImage rotate(const GrayImage& img, double degrees) {
    double a = std::fmod(degrees, 360.0);
    if (a < 0.0) a += 360.0;
    if (a == 0.0) return img;
    if (a == 180.0) {
        GrayImage out(img.width, img.height);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                out.at(x, y) = img.at(img.width - 1 - x, img.height - 1 - y);
        return out;
    }

    const auto [c, s] = detail::rotation_trig(a);
    const double ac = std::abs(c), as = std::abs(s);
    const int w = img.width, h = img.height;
    const int out_w = static_cast<int>(std::ceil(w * ac + h * as));
    const int out_h = static_cast<int>(std::ceil(w * as + h * ac));
    GrayImage out(out_w, out_h);

    const double dcx = out_w / 2.0, dcy = out_h / 2.0;
    const double scx = w / 2.0, scy = h / 2.0;
    constexpr double kEdge = 1e-9;
    for (int y = 0; y < out_h; ++y) {
        const double py = y + 0.5 - dcy;
        for (int x = 0; x < out_w; ++x) {
            const double px = x + 0.5 - dcx;
            // inverse rotation of the destination sample point
            const double sx = c * px + s * py + scx;
            const double sy = -s * px + c * py + scy;
            if (sx < -kEdge || sx > w + kEdge || sy < -kEdge || sy > h + kEdge)
                continue;  // outside the source: stays black
            const double fx = sx - 0.5, fy = sy - 0.5;
            const double flx = std::floor(fx), fly = std::floor(fy);
            const double tx = fx - flx, ty = fy - fly;
            const int x0 = std::clamp(static_cast<int>(flx), 0, w - 1);
            const int x1 = std::clamp(static_cast<int>(flx) + 1, 0, w - 1);
            const int y0 = std::clamp(static_cast<int>(fly), 0, h - 1);
            const int y1 = std::clamp(static_cast<int>(fly) + 1, 0, h - 1);
            const double top = (1.0 - tx) * img.at(x0, y0) + tx * img.at(x1, y0);
            const double bot = (1.0 - tx) * img.at(x0, y1) + tx * img.at(x1, y1);
            out.at(x, y) = std::clamp((1.0 - ty) * top + ty * bot, 0.0, 1.0);
        }
    }
    return out;
}

/// Cut the largest axis-aligned rectangle with the original aspect ratio out
/// of a rotated canvas, leaving no fill pixels.
///
/// `img` must be the rotate(img0, degrees) result of an orig_w x orig_h
/// source; the rectangle is centered on the canvas.
inline GrayImage inscribe_crop(const GrayImage& img, double degrees, int orig_w, int orig_h) {
    const auto [c0, s0] = detail::rotation_trig(degrees);
    const double c = std::abs(c0), s = std::abs(s0);
    // Largest scale f with (f*w) cos + (f*h) sin <= w and the transposed
    // constraint <= h; f = 1 at multiples of 90 degrees.
    const double f = std::min(orig_w / (orig_w * c + orig_h * s),
                              orig_h / (orig_w * s + orig_h * c));
    const int cw = static_cast<int>(std::floor(f * orig_w));
    const int ch = static_cast<int>(std::floor(f * orig_h));
    if (cw < 1 || ch < 1)
        throw std::invalid_argument("inscribe_crop: inscribed rectangle is degenerate");
    if (cw > img.width || ch > img.height)
        throw std::invalid_argument("inscribe_crop: canvas smaller than inscribed rectangle");
    const int x0 = (img.width - cw) / 2;
    const int y0 = (img.height - ch) / 2;
    GrayImage out(cw, ch);
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x)
            out.at(x, y) = img.at(x0 + x, y0 + y);
    return out;
}

}  // namespace percep
