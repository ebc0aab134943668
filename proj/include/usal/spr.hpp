#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "usal/types.hpp"

namespace usal {

/// Convex fusion weights for pseudo-label refinement. Must sum to 1; sums
/// that are off are rejected rather than renormalized so config mistakes
/// surface immediately.
struct SprWeights {
    double lambda1 = 0.2;  // prior rectification
    double lambda2 = 0.6;  // posterior rectification
    double lambda3 = 0.2;  // previous label

    SprWeights() = default;
    SprWeights(double l1, double l2, double l3) : lambda1(l1), lambda2(l2), lambda3(l3) {
        validate();
    }

    void validate() const {
        if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !(lambda3 >= 0.0)) {
            throw DataError("SprWeights: weights must be non-negative");
        }
        const double sum = lambda1 + lambda2 + lambda3;
        if (std::fabs(sum - 1.0) > 1e-12) {
            throw DataError("SprWeights: weights must sum to 1, got " + std::to_string(sum));
        }
    }
};

/// Pixelwise refined pseudo-label:
///   G_ref = lambda1 * R_pri + lambda2 * R_post + lambda3 * G_pre.
/// Convexity keeps the output inside [min, max] of the inputs.
inline SaliencyMap spr_update(const SaliencyMap& r_pri, const SaliencyMap& r_post,
                              const SaliencyMap& g_pre, const SprWeights& w) {
    w.validate();
    require_same_shape(r_pri, r_post, "spr_update");
    require_same_shape(r_pri, g_pre, "spr_update");
    std::vector<double> out(static_cast<std::size_t>(r_pri.size()));
    for (int i = 0; i < r_pri.size(); ++i) {
        const double v = w.lambda1 * r_pri[i] + w.lambda2 * r_post[i] + w.lambda3 * g_pre[i];
        // Convex in exact arithmetic; shave rounding spill at the box edge.
        out[static_cast<std::size_t>(i)] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }
    return SaliencyMap(r_pri.width(), r_pri.height(), std::move(out));
}

/// Posterior rectification is the model's own prediction, unchanged. Exists
/// so pipeline code reads like the refinement it implements.
inline SaliencyMap posterior_rectify(const SaliencyMap& model_prediction) {
    return model_prediction;
}

}  // namespace usal
