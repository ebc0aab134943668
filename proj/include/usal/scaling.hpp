#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "usal/types.hpp"

namespace usal {

/// Dimensions of a scale transform plus what is needed to undo it.
struct ScaleRecipe {
    double scale = 1.0;
    int src_width = 0;
    int src_height = 0;
    int dst_width = 0;
    int dst_height = 0;
};

inline ScaleRecipe make_scale_recipe(int width, int height, double s) {
    if (!(s >= 0.5 && s <= 2.0)) {
        throw DataError("make_scale_recipe: scale must be in [0.5, 2.0], got " +
                        std::to_string(s));
    }
    ScaleRecipe r;
    r.scale = s;
    r.src_width = width;
    r.src_height = height;
    r.dst_width = static_cast<int>(std::lround(s * width));
    r.dst_height = static_cast<int>(std::lround(s * height));
    if (r.dst_width < 3 || r.dst_height < 3) {
        throw DataError("make_scale_recipe: scaled dimensions below 3x3");
    }
    return r;
}

namespace scaling_detail {

// lerp keeps constants bit-exact: a + t * (b - a) returns a when a == b.
inline double lerp(double a, double b, double t) { return a + t * (b - a); }

/// Half-pixel-centered bilinear resampling of a row-major multi-channel
/// buffer. Equal dimensions reproduce the input bit-exactly.
inline std::vector<double> resample(const std::vector<double>& src, int src_w, int src_h,
                                    int channels, int dst_w, int dst_h) {
    if (dst_w == src_w && dst_h == src_h) return src;
    std::vector<double> dst(static_cast<std::size_t>(dst_w) * dst_h * channels);
    const double rx = static_cast<double>(src_w) / dst_w;
    const double ry = static_cast<double>(src_h) / dst_h;
    for (int y = 0; y < dst_h; ++y) {
        double sy = (y + 0.5) * ry - 0.5;
        sy = std::clamp(sy, 0.0, static_cast<double>(src_h - 1));
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, src_h - 1);
        const double fy = sy - y0;
        for (int x = 0; x < dst_w; ++x) {
            double sx = (x + 0.5) * rx - 0.5;
            sx = std::clamp(sx, 0.0, static_cast<double>(src_w - 1));
            const int x0 = static_cast<int>(sx);
            const int x1 = std::min(x0 + 1, src_w - 1);
            const double fx = sx - x0;
            for (int ch = 0; ch < channels; ++ch) {
                const auto at = [&](int r, int c) {
                    return src[(static_cast<std::size_t>(r) * src_w + c) * channels + ch];
                };
                const double top = lerp(at(y0, x0), at(y0, x1), fx);
                const double bot = lerp(at(y1, x0), at(y1, x1), fx);
                const double v = lerp(top, bot, fy);
                dst[(static_cast<std::size_t>(y) * dst_w + x) * channels + ch] =
                    std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return dst;
}

}  // namespace scaling_detail

inline SaliencyMap resample_bilinear(const SaliencyMap& map, int out_width, int out_height) {
    if (out_width < 1 || out_height < 1) {
        throw DataError("resample_bilinear: output dimensions must be >= 1");
    }
    return SaliencyMap(out_width, out_height,
                       scaling_detail::resample(map.values(), map.width(), map.height(), 1,
                                                out_width, out_height));
}

inline Image resample_bilinear(const Image& img, int out_width, int out_height) {
    if (out_width < 1 || out_height < 1) {
        throw DataError("resample_bilinear: output dimensions must be >= 1");
    }
    return Image(out_width, out_height, img.channels(),
                 scaling_detail::resample(img.values(), img.width(), img.height(),
                                          img.channels(), out_width, out_height));
}

/// A field resampled to the scaled size together with the recipe that maps a
/// same-scaled prediction back to the original shape.
struct ScaledField {
    SaliencyMap field;
    ScaleRecipe recipe;
};

inline ScaledField scale_transform(const SaliencyMap& map, double s) {
    const ScaleRecipe r = make_scale_recipe(map.width(), map.height(), s);
    return ScaledField{resample_bilinear(map, r.dst_width, r.dst_height), r};
}

/// Resamples a prediction made at the scaled size back to the source shape.
inline SaliencyMap invert_scale(const SaliencyMap& scaled, const ScaleRecipe& r) {
    if (scaled.width() != r.dst_width || scaled.height() != r.dst_height) {
        throw DataError("invert_scale: field does not match recipe's scaled shape");
    }
    return resample_bilinear(scaled, r.src_width, r.src_height);
}

/// Scale down/up round trip at scale s; the transformed-prediction stand-in
/// used by the structural consistency loss.
inline SaliencyMap scale_roundtrip(const SaliencyMap& map, double s) {
    const ScaledField scaled = scale_transform(map, s);
    return invert_scale(scaled.field, scaled.recipe);
}

}  // namespace usal
