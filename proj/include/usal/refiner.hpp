#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "usal/types.hpp"

namespace usal {

struct RefinerConfig {
    double omega1 = 1.0;      // feature smoothness
    double omega2 = 1.0;      // position smoothness
    double omega3 = 0.01;     // position-branch weight
    int iterations = 10;      // refinement pass count
    double sigma_floor = 1e-6;

    void validate() const {
        if (!(omega1 > 0.0) || !(omega2 > 0.0)) {
            throw DataError("RefinerConfig: omega1 and omega2 must be > 0");
        }
        if (!(omega3 >= 0.0)) {
            throw DataError("RefinerConfig: omega3 must be >= 0");
        }
        if (iterations < 1) {
            throw DataError("RefinerConfig: iterations must be >= 1, got " +
                            std::to_string(iterations));
        }
        if (!(sigma_floor > 0.0)) {
            throw DataError("RefinerConfig: sigma_floor must be > 0");
        }
    }
};

/// Per-pixel normalized weights over the 8-neighborhood, stored flat in
/// kNeighborOffsets order. Slots whose neighbor falls outside the image hold
/// 0 and are never read; per pixel, weights over existing neighbors sum to 1.
struct AffinityField {
    int width = 0;
    int height = 0;
    std::vector<double> weights;  // size = width * height * 8

    int size() const { return width * height; }
    double weight(int pixel, int k) const {
        return weights[static_cast<std::size_t>(pixel) * kNeighborCount + k];
    }
};

namespace refiner_detail {

/// Population standard deviation of all channel values.
inline double feature_sigma(const Image& img) {
    const std::vector<double>& v = img.values();
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());
    return std::sqrt(var);
}

/// Population standard deviation of the 8-neighbor distance multiset
/// {1 x4, sqrt(2) x4}.
inline double position_sigma() {
    const double d[2] = {1.0, std::sqrt(2.0)};
    const double mean = (d[0] + d[1]) / 2.0;
    const double var = ((d[0] - mean) * (d[0] - mean) + (d[1] - mean) * (d[1] - mean)) / 2.0;
    return std::sqrt(var);
}

/// Euclidean distance across channels between pixels i and j.
inline double feature_distance(const Image& img, int i, int j) {
    const int ch = img.channels();
    const std::size_t a = static_cast<std::size_t>(i) * ch;
    const std::size_t b = static_cast<std::size_t>(j) * ch;
    double sum = 0.0;
    for (int c = 0; c < ch; ++c) {
        const double d = img.values()[a + c] - img.values()[b + c];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace refiner_detail

/// Builds the edge-aware affinity kernel from the input image: per pixel, a
/// softmax over negative feature distances plus omega3 times a softmax over
/// negative position distances, each taken over the pixel's existing
/// 8-neighbors, with the combination divided by (1 + omega3).
inline AffinityField affinity_kernel(const Image& img, const RefinerConfig& cfg) {
    cfg.validate();
    if (img.pixel_count() < 2) {
        throw DataError("affinity_kernel: image must have at least 2 pixels");
    }
    const double sigma_f = std::max(refiner_detail::feature_sigma(img), cfg.sigma_floor);
    const double sigma_p = std::max(refiner_detail::position_sigma(), cfg.sigma_floor);
    const double feat_scale = 1.0 / (cfg.omega1 * sigma_f);
    const double pos_scale = 1.0 / (cfg.omega2 * sigma_p);

    AffinityField field;
    field.width = img.width();
    field.height = img.height();
    field.weights.assign(static_cast<std::size_t>(img.pixel_count()) * kNeighborCount, 0.0);

    double df[kNeighborCount];
    double dp[kNeighborCount];
    int nbr[kNeighborCount];

    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            const int i = r * img.width() + c;
            int count = 0;
            double df_max = -1e300;
            double dp_max = -1e300;
            for (int k = 0; k < kNeighborCount; ++k) {
                const int rr = r + kNeighborOffsets[k][0];
                const int cc = c + kNeighborOffsets[k][1];
                if (rr < 0 || rr >= img.height() || cc < 0 || cc >= img.width()) {
                    nbr[k] = -1;
                    continue;
                }
                const int j = rr * img.width() + cc;
                nbr[k] = j;
                const double dist_p = std::sqrt(
                    static_cast<double>(kNeighborOffsets[k][0] * kNeighborOffsets[k][0] +
                                        kNeighborOffsets[k][1] * kNeighborOffsets[k][1]));
                df[k] = -refiner_detail::feature_distance(img, i, j) * feat_scale;
                dp[k] = -dist_p * pos_scale;
                df_max = std::max(df_max, df[k]);
                dp_max = std::max(dp_max, dp[k]);
                ++count;
            }
            if (count == 0) continue;  // unreachable: image has >= 2 pixels

            double ef_sum = 0.0;
            double ep_sum = 0.0;
            for (int k = 0; k < kNeighborCount; ++k) {
                if (nbr[k] < 0) continue;
                ef_sum += std::exp(df[k] - df_max);
                ep_sum += std::exp(dp[k] - dp_max);
            }
            const double norm = 1.0 / (1.0 + cfg.omega3);
            for (int k = 0; k < kNeighborCount; ++k) {
                if (nbr[k] < 0) continue;
                const double wf = std::exp(df[k] - df_max) / ef_sum;
                const double wp = std::exp(dp[k] - dp_max) / ep_sum;
                field.weights[static_cast<std::size_t>(i) * kNeighborCount + k] =
                    (wf + cfg.omega3 * wp) * norm;
            }
        }
    }
    return field;
}

/// One aggregation pass: S'(i) = sum_j w_ij S(j) over the 8-neighbors,
/// applied `iterations` times. Written in diffusion form
/// S(i) + sum_j w_ij (S(j) - S(i)) so constant maps are exact fixed points.
inline SaliencyMap refine(const SaliencyMap& s, const AffinityField& aff, int iterations) {
    if (s.width() != aff.width || s.height() != aff.height) {
        throw DataError("refine: map shape does not match affinity field");
    }
    if (iterations < 1) {
        throw DataError("refine: iterations must be >= 1, got " + std::to_string(iterations));
    }
    std::vector<double> cur = s.values();
    std::vector<double> next(cur.size());
    for (int it = 0; it < iterations; ++it) {
        for (int r = 0; r < s.height(); ++r) {
            for (int c = 0; c < s.width(); ++c) {
                const int i = r * s.width() + c;
                const double center = cur[static_cast<std::size_t>(i)];
                double acc = 0.0;
                for (int k = 0; k < kNeighborCount; ++k) {
                    const int rr = r + kNeighborOffsets[k][0];
                    const int cc = c + kNeighborOffsets[k][1];
                    if (rr < 0 || rr >= s.height() || cc < 0 || cc >= s.width()) continue;
                    const int j = rr * s.width() + cc;
                    acc += aff.weight(i, k) * (cur[static_cast<std::size_t>(j)] - center);
                }
                next[static_cast<std::size_t>(i)] =
                    std::clamp(center + acc, 0.0, 1.0);
            }
        }
        cur.swap(next);
    }
    return SaliencyMap(s.width(), s.height(), std::move(cur));
}

/// Prior rectification: build the affinity kernel from the image and run
/// cfg.iterations refinement passes over the map.
inline SaliencyMap prior_rectify(const SaliencyMap& s, const Image& img,
                                 const RefinerConfig& cfg) {
    require_same_shape(s, img, "prior_rectify");
    return refine(s, affinity_kernel(img, cfg), cfg.iterations);
}

}  // namespace usal
