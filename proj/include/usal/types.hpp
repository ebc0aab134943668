#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace usal {

/// Bad input data: malformed files, invariant violations, shape mismatches.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values or other numerical breakdown during optimization.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// 8-neighborhood offsets in fixed order: N, NE, E, SE, S, SW, W, NW.
// Texture vectors and affinity fields share this ordering.
inline constexpr int kNeighborCount = 8;
inline constexpr std::array<std::array<int, 2>, 8> kNeighborOffsets = {{
    {{-1, 0}}, {{-1, 1}}, {{0, 1}}, {{1, 1}}, {{1, 0}}, {{1, -1}}, {{0, -1}}, {{-1, -1}},
}};

namespace detail {

inline void check_dims(int width, int height, const char* what) {
    if (width < 1 || height < 1) {
        throw DataError(std::string(what) + ": dimensions must be >= 1, got " +
                        std::to_string(width) + "x" + std::to_string(height));
    }
}

inline void check_unit_range(const std::vector<double>& values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DataError(std::string(what) + ": value " + std::to_string(v) +
                            " at index " + std::to_string(i) + " outside [0,1]");
        }
    }
}

}  // namespace detail

/// Dense H x W saliency field, row-major, every value in [0,1].
/// Immutable after construction; i = r * width + c.
class SaliencyMap {
public:
    SaliencyMap(int width, int height, std::vector<double> values)
        : width_(width), height_(height), values_(std::move(values)) {
        detail::check_dims(width_, height_, "SaliencyMap");
        if (values_.size() != static_cast<std::size_t>(width_) * height_) {
            throw DataError("SaliencyMap: expected " + std::to_string(width_ * height_) +
                            " values, got " + std::to_string(values_.size()));
        }
        detail::check_unit_range(values_, "SaliencyMap");
    }

    static SaliencyMap filled(int width, int height, double value) {
        return SaliencyMap(width, height,
                           std::vector<double>(static_cast<std::size_t>(width) * height, value));
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int size() const { return width_ * height_; }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    double at(int r, int c) const { return values_[static_cast<std::size_t>(r) * width_ + c]; }
    const std::vector<double>& values() const { return values_; }

    bool same_shape(const SaliencyMap& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_;
    int height_;
    std::vector<double> values_;
};

/// Dense H x W x C image, row-major interleaved channels, values in [0,1].
class Image {
public:
    Image(int width, int height, int channels, std::vector<double> values)
        : width_(width), height_(height), channels_(channels), values_(std::move(values)) {
        detail::check_dims(width_, height_, "Image");
        if (channels_ < 1) {
            throw DataError("Image: channels must be >= 1, got " + std::to_string(channels_));
        }
        const std::size_t expected =
            static_cast<std::size_t>(width_) * height_ * channels_;
        if (values_.size() != expected) {
            throw DataError("Image: expected " + std::to_string(expected) + " values, got " +
                            std::to_string(values_.size()));
        }
        detail::check_unit_range(values_, "Image");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    int pixel_count() const { return width_ * height_; }
    double at(int r, int c, int ch) const {
        return values_[(static_cast<std::size_t>(r) * width_ + c) * channels_ + ch];
    }
    const std::vector<double>& values() const { return values_; }

    /// Mean across channels at pixel index i.
    double channel_mean(int i) const {
        const std::size_t base = static_cast<std::size_t>(i) * channels_;
        double sum = 0.0;
        for (int ch = 0; ch < channels_; ++ch) sum += values_[base + ch];
        return sum / channels_;
    }

private:
    int width_;
    int height_;
    int channels_;
    std::vector<double> values_;
};

/// Row-major boolean mask.
class BinaryMask {
public:
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
        : width_(width), height_(height), bits_(std::move(bits)) {
        detail::check_dims(width_, height_, "BinaryMask");
        if (bits_.size() != static_cast<std::size_t>(width_) * height_) {
            throw DataError("BinaryMask: expected " + std::to_string(width_ * height_) +
                            " bits, got " + std::to_string(bits_.size()));
        }
        for (std::size_t i = 0; i < bits_.size(); ++i) {
            if (bits_[i] > 1) {
                throw DataError("BinaryMask: bit at index " + std::to_string(i) +
                                " is not 0 or 1");
            }
        }
    }

    static BinaryMask filled(int width, int height, bool value) {
        return BinaryMask(width, height,
                          std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height,
                                                    value ? 1 : 0));
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int size() const { return width_ * height_; }
    bool operator[](int i) const { return bits_[static_cast<std::size_t>(i)] != 0; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    int count() const {
        int n = 0;
        for (auto b : bits_) n += b;
        return n;
    }

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

/// Per-pixel partial derivatives; same shape as the map it differentiates,
/// values unbounded.
struct Gradient {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    static Gradient zeros(int width, int height) {
        Gradient g;
        g.width = width;
        g.height = height;
        g.values.assign(static_cast<std::size_t>(width) * height, 0.0);
        return g;
    }

    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
};

/// Scalar loss plus its per-pixel gradient.
struct LossResult {
    double value = 0.0;
    Gradient gradient;
};

inline void require_same_shape(const SaliencyMap& a, const SaliencyMap& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DataError(std::string(what) + ": shape mismatch " + std::to_string(a.width()) +
                        "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                        "x" + std::to_string(b.height()));
    }
}

inline void require_same_shape(const SaliencyMap& a, const BinaryMask& m, const char* what) {
    if (a.width() != m.width() || a.height() != m.height()) {
        throw DataError(std::string(what) + ": shape mismatch " + std::to_string(a.width()) +
                        "x" + std::to_string(a.height()) + " vs mask " +
                        std::to_string(m.width()) + "x" + std::to_string(m.height()));
    }
}

inline void require_same_shape(const SaliencyMap& a, const Image& img, const char* what) {
    if (a.width() != img.width() || a.height() != img.height()) {
        throw DataError(std::string(what) + ": shape mismatch " + std::to_string(a.width()) +
                        "x" + std::to_string(a.height()) + " vs image " +
                        std::to_string(img.width()) + "x" + std::to_string(img.height()));
    }
}

/// Pixel coordinates (row, col) for every pixel in row-major order.
inline std::vector<std::array<double, 2>> position_grid(int width, int height) {
    detail::check_dims(width, height, "position_grid");
    std::vector<std::array<double, 2>> grid;
    grid.reserve(static_cast<std::size_t>(width) * height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            grid.push_back({static_cast<double>(r), static_cast<double>(c)});
        }
    }
    return grid;
}

}  // namespace usal
