#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "usal/curriculum.hpp"
#include "usal/types.hpp"

namespace usal {

inline constexpr double kTextureNormCutoff = 1e-8;
inline constexpr double kDefaultBoundaryThreshold = 0.1;
inline constexpr double kBceEpsilon = 1e-7;

struct LossWeights {
    double gamma = 0.05;  // boundary texture-matching weight

    void validate() const {
        if (!(gamma >= 0.0)) {
            throw DataError("LossWeights: gamma must be >= 0");
        }
    }
};

/// Per-pixel texture descriptors: the 8-vector of (center - neighbor)
/// differences in kNeighborOffsets order, L2-normalized when the norm
/// exceeds the cutoff, zero otherwise. Missing neighbors contribute 0.
struct TextureField {
    int width = 0;
    int height = 0;
    std::vector<double> vectors;  // size = width * height * 8

    const double* vec(int pixel) const {
        return vectors.data() + static_cast<std::size_t>(pixel) * kNeighborCount;
    }
};

namespace loss_detail {

inline void check_min_3x3(int width, int height, const char* what) {
    if (width < 3 || height < 3) {
        throw DataError(std::string(what) + ": field must be at least 3x3, got " +
                        std::to_string(width) + "x" + std::to_string(height));
    }
}

/// Raw (unnormalized) difference vectors for a scalar field.
inline std::vector<double> raw_texture(const std::vector<double>& v, int width, int height) {
    std::vector<double> raw(static_cast<std::size_t>(width) * height * kNeighborCount, 0.0);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const int i = r * width + c;
            const double center = v[static_cast<std::size_t>(i)];
            for (int k = 0; k < kNeighborCount; ++k) {
                const int rr = r + kNeighborOffsets[k][0];
                const int cc = c + kNeighborOffsets[k][1];
                if (rr < 0 || rr >= height || cc < 0 || cc >= width) continue;
                raw[static_cast<std::size_t>(i) * kNeighborCount + k] =
                    center - v[static_cast<std::size_t>(rr) * width + cc];
            }
        }
    }
    return raw;
}

inline TextureField normalize_texture(std::vector<double> raw, int width, int height) {
    TextureField t;
    t.width = width;
    t.height = height;
    const int n = width * height;
    for (int i = 0; i < n; ++i) {
        double* u = raw.data() + static_cast<std::size_t>(i) * kNeighborCount;
        double sq = 0.0;
        for (int k = 0; k < kNeighborCount; ++k) sq += u[k] * u[k];
        const double norm = std::sqrt(sq);
        if (norm > kTextureNormCutoff) {
            for (int k = 0; k < kNeighborCount; ++k) u[k] /= norm;
        } else {
            for (int k = 0; k < kNeighborCount; ++k) u[k] = 0.0;
        }
    }
    t.vectors = std::move(raw);
    return t;
}

inline std::vector<double> channel_mean_values(const Image& img) {
    std::vector<double> v(static_cast<std::size_t>(img.pixel_count()));
    for (int i = 0; i < img.pixel_count(); ++i) v[static_cast<std::size_t>(i)] = img.channel_mean(i);
    return v;
}

}  // namespace loss_detail

inline TextureField texture_vector(const SaliencyMap& field) {
    loss_detail::check_min_3x3(field.width(), field.height(), "texture_vector");
    return loss_detail::normalize_texture(
        loss_detail::raw_texture(field.values(), field.width(), field.height()),
        field.width(), field.height());
}

/// Image variant: channels are averaged before texture extraction so the
/// descriptor matches the saliency one component for component.
inline TextureField texture_vector(const Image& img) {
    loss_detail::check_min_3x3(img.width(), img.height(), "texture_vector");
    return loss_detail::normalize_texture(
        loss_detail::raw_texture(loss_detail::channel_mean_values(img), img.width(),
                                 img.height()),
        img.width(), img.height());
}

/// Bit i = 1 iff the max absolute difference between S(i) and its existing
/// 8-neighbors exceeds the threshold.
inline BinaryMask boundary_mask(const SaliencyMap& s,
                                double threshold = kDefaultBoundaryThreshold) {
    loss_detail::check_min_3x3(s.width(), s.height(), "boundary_mask");
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(s.size()), 0);
    for (int r = 0; r < s.height(); ++r) {
        for (int c = 0; c < s.width(); ++c) {
            const int i = r * s.width() + c;
            double max_diff = 0.0;
            for (int k = 0; k < kNeighborCount; ++k) {
                const int rr = r + kNeighborOffsets[k][0];
                const int cc = c + kNeighborOffsets[k][1];
                if (rr < 0 || rr >= s.height() || cc < 0 || cc >= s.width()) continue;
                max_diff = std::max(max_diff, std::fabs(s[i] - s.at(rr, cc)));
            }
            bits[static_cast<std::size_t>(i)] = max_diff > threshold ? 1 : 0;
        }
    }
    return BinaryMask(s.width(), s.height(), std::move(bits));
}

/// Boundary-aware texture matching against a precomputed image texture:
///   value = sum_i b_i <T_s(i), T_a(i)> / sum_i b_i   (0 when no boundary).
/// The boundary mask is a constant selector; the gradient flows through the
/// saliency texture extraction and its normalization only.
inline LossResult btm_loss(const SaliencyMap& s, const TextureField& image_texture,
                           double boundary_threshold = kDefaultBoundaryThreshold) {
    loss_detail::check_min_3x3(s.width(), s.height(), "btm_loss");
    if (s.width() != image_texture.width || s.height() != image_texture.height) {
        throw DataError("btm_loss: map shape does not match image texture");
    }

    const BinaryMask boundary = boundary_mask(s, boundary_threshold);
    LossResult out;
    out.gradient = Gradient::zeros(s.width(), s.height());
    const int b_total = boundary.count();
    if (b_total == 0) {
        out.value = 0.0;
        return out;
    }

    const std::vector<double> raw =
        loss_detail::raw_texture(s.values(), s.width(), s.height());
    const double inv_b = 1.0 / static_cast<double>(b_total);

    double sum = 0.0;
    for (int r = 0; r < s.height(); ++r) {
        for (int c = 0; c < s.width(); ++c) {
            const int i = r * s.width() + c;
            if (!boundary[i]) continue;

            const double* u = raw.data() + static_cast<std::size_t>(i) * kNeighborCount;
            const double* a = image_texture.vec(i);
            double sq = 0.0;
            for (int k = 0; k < kNeighborCount; ++k) sq += u[k] * u[k];
            const double norm = std::sqrt(sq);
            if (norm <= kTextureNormCutoff) continue;  // zero vector: no value, no gradient

            double dot = 0.0;
            for (int k = 0; k < kNeighborCount; ++k) dot += (u[k] / norm) * a[k];
            sum += dot;

            // d<u/|u|, a>/du_k = (a_k - (u_k/|u|) * dot) / |u|
            for (int k = 0; k < kNeighborCount; ++k) {
                const int rr = r + kNeighborOffsets[k][0];
                const int cc = c + kNeighborOffsets[k][1];
                if (rr < 0 || rr >= s.height() || cc < 0 || cc >= s.width()) continue;
                const double g = inv_b * (a[k] - (u[k] / norm) * dot) / norm;
                out.gradient[i] += g;
                out.gradient[rr * s.width() + cc] -= g;
            }
        }
    }
    out.value = sum * inv_b;
    return out;
}

inline LossResult btm_loss(const SaliencyMap& s, const Image& img,
                           double boundary_threshold = kDefaultBoundaryThreshold) {
    require_same_shape(s, img, "btm_loss");
    return btm_loss(s, texture_vector(img), boundary_threshold);
}

/// Structural consistency: mean absolute deviation from the prediction on
/// the transformed input, gradient taken toward S only.
inline LossResult sc_loss(const SaliencyMap& s, const SaliencyMap& s_hat) {
    require_same_shape(s, s_hat, "sc_loss");
    const double inv_n = 1.0 / static_cast<double>(s.size());
    LossResult out;
    out.gradient = Gradient::zeros(s.width(), s.height());
    double sum = 0.0;
    for (int i = 0; i < s.size(); ++i) {
        const double d = s[i] - s_hat[i];
        sum += std::fabs(d);
        if (d > 0.0) {
            out.gradient[i] = inv_n;
        } else if (d < 0.0) {
            out.gradient[i] = -inv_n;
        }
    }
    out.value = sum * inv_n;
    return out;
}

/// Soft IoU: value = 1 - sum(S*G) / sum(S + G - S*G);
/// d/dS_i = -[G_i * U - (1 - G_i) * I] / U^2.
inline LossResult iou_loss(const SaliencyMap& s, const SaliencyMap& g) {
    require_same_shape(s, g, "iou_loss");
    double inter = 0.0;
    double uni = 0.0;
    for (int i = 0; i < s.size(); ++i) {
        const double p = s[i] * g[i];
        inter += p;
        uni += s[i] + g[i] - p;
    }
    if (!(uni > 0.0)) {
        throw DataError("iou_loss: union is zero (both maps all-zero)");
    }
    LossResult out;
    out.value = 1.0 - inter / uni;
    out.gradient = Gradient::zeros(s.width(), s.height());
    const double inv_u2 = 1.0 / (uni * uni);
    for (int i = 0; i < s.size(); ++i) {
        out.gradient[i] = -(g[i] * uni - (1.0 - g[i]) * inter) * inv_u2;
    }
    return out;
}

/// Binary cross entropy with the prediction clamped to [eps, 1-eps].
inline LossResult bce_loss(const SaliencyMap& s, const SaliencyMap& g) {
    require_same_shape(s, g, "bce_loss");
    const double inv_n = 1.0 / static_cast<double>(s.size());
    LossResult out;
    out.gradient = Gradient::zeros(s.width(), s.height());
    double sum = 0.0;
    for (int i = 0; i < s.size(); ++i) {
        const double st = std::clamp(s[i], kBceEpsilon, 1.0 - kBceEpsilon);
        sum += g[i] * std::log(st) + (1.0 - g[i]) * std::log(1.0 - st);
        if (s[i] > kBceEpsilon && s[i] < 1.0 - kBceEpsilon) {
            out.gradient[i] = -inv_n * (g[i] / st - (1.0 - g[i]) / (1.0 - st));
        }
        // else: the clamp is active and the loss is locally flat in s[i]
    }
    out.value = -sum * inv_n;
    return out;
}

namespace loss_detail {

inline void accumulate(LossResult& total, const LossResult& part, double weight) {
    total.value += weight * part.value;
    for (std::size_t i = 0; i < total.gradient.values.size(); ++i) {
        total.gradient.values[i] += weight * part.gradient.values[i];
    }
}

}  // namespace loss_detail

/// Stage-1 objective: pcl_sd + gamma * btm + sc.
inline LossResult sce_total(const SaliencyMap& s, const SaliencyMap& s_hat, const Image& img,
                            const LossWeights& w, const BinaryMask& mask) {
    w.validate();
    LossResult total = pcl_sd_loss(s, mask);
    loss_detail::accumulate(total, btm_loss(s, img), w.gamma);
    loss_detail::accumulate(total, sc_loss(s, s_hat), 1.0);
    return total;
}

/// sce_total with a precomputed image texture (the image does not change
/// across optimization steps).
inline LossResult sce_total(const SaliencyMap& s, const SaliencyMap& s_hat,
                            const TextureField& image_texture, const LossWeights& w,
                            const BinaryMask& mask) {
    w.validate();
    LossResult total = pcl_sd_loss(s, mask);
    loss_detail::accumulate(total, btm_loss(s, image_texture), w.gamma);
    loss_detail::accumulate(total, sc_loss(s, s_hat), 1.0);
    return total;
}

/// Stage-2 objective: iou + sc.
inline LossResult sd_total(const SaliencyMap& s, const SaliencyMap& s_hat,
                           const SaliencyMap& g) {
    LossResult total = iou_loss(s, g);
    loss_detail::accumulate(total, sc_loss(s, s_hat), 1.0);
    return total;
}

}  // namespace usal
