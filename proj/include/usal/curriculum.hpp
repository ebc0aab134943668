#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "usal/types.hpp"

namespace usal {

/// Progressive hard-sample threshold schedule:
///   p(epoch) = max(0, p0 - slope * epoch / total_epochs).
///
/// p0 and slope are held as exact integers in units of 1e-6, so the clamp
/// to zero happens exactly where the decimal formula says it does. With the
/// defaults (0.2, 0.6) the threshold is exactly 0 from epoch
/// ceil(total_epochs / 3) on; plain double arithmetic leaves ~1e-17 residue
/// at that boundary.
class CurriculumSchedule {
public:
    CurriculumSchedule(double p0, double slope, int total_epochs)
        : p0_micro_(to_micro(p0, "p0")),
          slope_micro_(to_micro(slope, "slope")),
          total_epochs_(total_epochs) {
        if (p0_micro_ < 0 || p0_micro_ > 500000) {
            throw DataError("CurriculumSchedule: p0 must be in [0, 0.5], got " +
                            std::to_string(p0));
        }
        if (slope_micro_ < 0) {
            throw DataError("CurriculumSchedule: slope must be >= 0, got " +
                            std::to_string(slope));
        }
        if (total_epochs_ < 1) {
            throw DataError("CurriculumSchedule: total_epochs must be >= 1, got " +
                            std::to_string(total_epochs));
        }
    }

    static CurriculumSchedule defaults(int total_epochs) {
        return CurriculumSchedule(0.2, 0.6, total_epochs);
    }

    double p0() const { return static_cast<double>(p0_micro_) / 1e6; }
    double slope() const { return static_cast<double>(slope_micro_) / 1e6; }
    int total_epochs() const { return total_epochs_; }

    std::int64_t p0_micro() const { return p0_micro_; }
    std::int64_t slope_micro() const { return slope_micro_; }

private:
    static std::int64_t to_micro(double v, const char* what) {
        if (!(v >= -1e6 && v <= 1e6)) {
            throw DataError(std::string("CurriculumSchedule: ") + what +
                            " out of range or non-finite");
        }
        return std::llround(v * 1e6);
    }

    std::int64_t p0_micro_;
    std::int64_t slope_micro_;
    int total_epochs_;
};

/// Threshold at a given epoch; monotone non-increasing, exactly 0 once
/// slope * epoch >= p0 * total_epochs.
inline double threshold_at(const CurriculumSchedule& schedule, int epoch) {
    if (epoch < 0) {
        throw DataError("threshold_at: epoch must be >= 0, got " + std::to_string(epoch));
    }
    const std::int64_t a = schedule.p0_micro() * schedule.total_epochs();
    const std::int64_t s = schedule.slope_micro();
    if (s > 0 && static_cast<std::int64_t>(epoch) > a / s) return 0.0;
    const std::int64_t numer = a - s * static_cast<std::int64_t>(epoch);
    if (numer <= 0) return 0.0;
    return static_cast<double>(numer) /
           (1e6 * static_cast<double>(schedule.total_epochs()));
}

/// Hard-sample mask per the curriculum: bit i is 0 (hard, excluded) iff
/// |S(i) - 0.5| < p strictly, else 1 (easy, included). p = 0 keeps everything.
inline BinaryMask hard_sample_mask(const SaliencyMap& s, double p) {
    if (!(p >= 0.0 && p <= 0.5)) {
        throw DataError("hard_sample_mask: p must be in [0, 0.5], got " + std::to_string(p));
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(s.size()));
    for (int i = 0; i < s.size(); ++i) {
        bits[static_cast<std::size_t>(i)] = std::fabs(s[i] - 0.5) < p ? 0 : 1;
    }
    return BinaryMask(s.width(), s.height(), std::move(bits));
}

/// Curriculum saliency-distilling loss:
///   value      = 0.5 - (1/N) * sum_i |M(i) * S(i) - 0.5|
///   gradient_i = -(1/N) * M(i) * sign(M(i) * S(i) - 0.5),  sign(0) := 0.
/// Masked pixels contribute |0 - 0.5| = 0.5 to the sum and exactly zero
/// gradient, which removes them from backpropagation entirely.
inline LossResult pcl_sd_loss(const SaliencyMap& s, const BinaryMask& mask) {
    require_same_shape(s, mask, "pcl_sd_loss");
    const int n = s.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    LossResult out;
    out.gradient = Gradient::zeros(s.width(), s.height());
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        if (mask[i]) {
            const double d = s[i] - 0.5;
            sum += std::fabs(d);
            if (d > 0.0) {
                out.gradient[i] = -inv_n;
            } else if (d < 0.0) {
                out.gradient[i] = inv_n;
            }
        } else {
            sum += 0.5;
        }
    }
    out.value = 0.5 - inv_n * sum;
    return out;
}

}  // namespace usal
