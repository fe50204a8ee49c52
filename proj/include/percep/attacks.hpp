// Copyright percep-hash contributors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

#include "percep/detail/font5x7.hpp"
#include "percep/imaging.hpp"

namespace percep {

enum class AttackKind { Annotate, Crop, Rotate180, Rotate45, RotateCustom };

/// One of the four benchmark transforms (plus the free-angle variant).
struct AttackSpec {
    AttackKind kind = AttackKind::Annotate;
    double crop_fraction = 0.075;              // Crop only, per side
    double angle_degrees = 0.0;                // RotateCustom only
    std::string label_text = "COPYRIGHTED";    // Annotate only

    static AttackSpec annotate(std::string text = "COPYRIGHTED") {
        AttackSpec s;
        s.kind = AttackKind::Annotate;
        s.label_text = std::move(text);
        return s;
    }
    static AttackSpec crop(double fraction_per_side = 0.075) {
        if (!(fraction_per_side > 0.0) || !(fraction_per_side < 0.5))
            throw std::invalid_argument("crop fraction must be in (0, 0.5)");
        AttackSpec s;
        s.kind = AttackKind::Crop;
        s.crop_fraction = fraction_per_side;
        return s;
    }
    static AttackSpec rotate180() { return {AttackKind::Rotate180}; }
    static AttackSpec rotate45() { return {AttackKind::Rotate45}; }
    static AttackSpec rotate(double degrees) {
        AttackSpec s;
        s.kind = AttackKind::RotateCustom;
        s.angle_degrees = degrees;
        return s;
    }
};

/// Text encoding used by the CLI and the CSV report.
inline std::string to_string(const AttackSpec& spec) {
    char buf[48];
    switch (spec.kind) {
        case AttackKind::Annotate: return "annotate";
        case AttackKind::Crop:
            std::snprintf(buf, sizeof buf, "crop:%g", spec.crop_fraction);
            return buf;
        case AttackKind::Rotate180: return "rot180";
        case AttackKind::Rotate45: return "rot45";
        case AttackKind::RotateCustom:
            std::snprintf(buf, sizeof buf, "rot:%g", spec.angle_degrees);
            return buf;
    }
    throw std::logic_error("unreachable");
}

inline AttackSpec parse_attack(std::string_view s) {
    if (s == "annotate") return AttackSpec::annotate();
    if (s == "rot180") return AttackSpec::rotate180();
    if (s == "rot45") return AttackSpec::rotate45();
    const auto parse_value = [&](std::string_view text) {
        try {
            return std::stod(std::string(text));
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed attack spec: " + std::string(s));
        }
    };
    if (s.starts_with("crop:")) return AttackSpec::crop(parse_value(s.substr(5)));
    if (s.starts_with("rot:")) return AttackSpec::rotate(parse_value(s.substr(4)));
    throw std::invalid_argument("unknown attack spec: " + std::string(s));
}

/// Stamp black text across the image in the embedded 5x7 font.
///
/// The string is uppercased and scaled by the largest integer factor that
/// keeps it within 80% of the image width (factor 1 at minimum), then
/// centered. Glyph pixels are set to 0; everything else is untouched. Text
/// that cannot fit even at factor 1 is truncated and reported via `warning`.
inline GrayImage annotate(const GrayImage& img, std::string_view text,
                          std::string* warning = nullptr) {
    if (text.empty())
        throw std::invalid_argument("annotate: text must be non-empty");
    std::string label;
    label.reserve(text.size());
    for (char ch : text) {
        const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (detail::find_glyph(up) == nullptr)
            throw std::invalid_argument(std::string("annotate: unsupported character '") + ch + "'");
        label.push_back(up);
    }

    // Glyphs are 5 columns wide with a 1-column gap: n glyphs span 6n - 1.
    const auto span = [](std::size_t n) { return 6 * static_cast<int>(n) - 1; };
    std::size_t n = label.size();
    while (n > 0 && span(n) > img.width) --n;
    if (n < label.size() && warning != nullptr)
        *warning = "annotate: text wider than image, truncated to \"" + label.substr(0, n) + "\"";
    if (n == 0) return img;
    label.resize(n);

    const int scale = std::max(1, static_cast<int>(0.8 * img.width) / span(n));
    const int band_w = scale * span(n);
    const int band_h = scale * 7;
    const int x_org = (img.width - band_w) / 2;
    const int y_org = (img.height - band_h) / 2;

    GrayImage out = img;
    for (std::size_t i = 0; i < label.size(); ++i) {
        const detail::Glyph5x7* glyph = detail::find_glyph(label[i]);
        const int gx = x_org + scale * 6 * static_cast<int>(i);
        for (int row = 0; row < 7; ++row)
            for (int col = 0; col < 5; ++col) {
                if (!((glyph->rows[row] >> (4 - col)) & 1)) continue;
                for (int dy = 0; dy < scale; ++dy)
                    for (int dx = 0; dx < scale; ++dx) {
                        const int px = gx + scale * col + dx;
                        const int py = y_org + scale * row + dy;
                        if (px >= 0 && px < out.width && py >= 0 && py < out.height)
                            out.at(px, py) = 0.0;
                    }
            }
    }
    return out;
}

/// Remove floor(fraction * dim) rows/columns from every side.
inline GrayImage center_crop(const GrayImage& img, double fraction_per_side) {
    if (!(fraction_per_side > 0.0) || !(fraction_per_side < 0.5))
        throw std::invalid_argument("center_crop: fraction must be in (0, 0.5)");
    const int dx = static_cast<int>(std::floor(fraction_per_side * img.width));
    const int dy = static_cast<int>(std::floor(fraction_per_side * img.height));
    const int cw = img.width - 2 * dx;
    const int ch = img.height - 2 * dy;
    if (cw < 1 || ch < 1)
        throw std::invalid_argument("center_crop: crop leaves an empty image");
    GrayImage out(cw, ch);
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x)
            out.at(x, y) = img.at(dx + x, dy + y);
    return out;
}

inline GrayImage apply_attack(const GrayImage& img, const AttackSpec& spec) {
    switch (spec.kind) {
        case AttackKind::Annotate:
            return annotate(img, spec.label_text);
        case AttackKind::Crop:
            return center_crop(img, spec.crop_fraction);
        case AttackKind::Rotate180:
            return rotate(img, 180.0);
        case AttackKind::Rotate45:
            return inscribe_crop(rotate(img, 45.0), 45.0, img.width, img.height);
        case AttackKind::RotateCustom:
            return inscribe_crop(rotate(img, spec.angle_degrees), spec.angle_degrees,
                                 img.width, img.height);
    }
    throw std::logic_error("unreachable");
}

}  // namespace percep
