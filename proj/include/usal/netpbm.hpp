#pragma once

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "usal/types.hpp"

namespace usal {

namespace netpbm_detail {

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(path + ": cannot open for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) {
        throw DataError(path + ": read failure");
    }
    return buf.str();
}

/// Token scanner over a Netpbm header. Tracks the byte offset so parse
/// errors can point at the exact position.
class Scanner {
public:
    Scanner(const std::string& data, const std::string& path) : data_(data), path_(path) {}

    std::size_t pos() const { return pos_; }
    bool at_end() const { return pos_ >= data_.size(); }

    [[noreturn]] void fail(const std::string& message) const {
        throw DataError(path_ + ": " + message + " at byte " + std::to_string(pos_));
    }

    /// Skips whitespace and `#` comments (comment runs to end of line).
    void skip_separators() {
        while (pos_ < data_.size()) {
            const char c = data_[pos_];
            if (c == '#') {
                while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
                       c == '\f') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    /// Reads a non-negative decimal integer token.
    long next_int(const char* what) {
        skip_separators();
        if (at_end()) fail(std::string("unexpected end of file, expected ") + what);
        if (data_[pos_] < '0' || data_[pos_] > '9') {
            fail(std::string("expected ") + what);
        }
        long value = 0;
        while (pos_ < data_.size() && data_[pos_] >= '0' && data_[pos_] <= '9') {
            value = value * 10 + (data_[pos_] - '0');
            if (value > 1000000000L) fail(std::string(what) + " out of range");
            ++pos_;
        }
        return value;
    }

    /// Consumes the single whitespace byte that ends a binary-format header.
    void consume_raster_separator() {
        if (at_end()) fail("unexpected end of file before raster");
        const char c = data_[pos_];
        if (c != ' ' && c != '\t' && c != '\r' && c != '\n') {
            fail("expected single whitespace before raster");
        }
        ++pos_;
    }

    const std::string& data() const { return data_; }
    void advance(std::size_t n) { pos_ += n; }

private:
    const std::string& data_;
    std::string path_;
    std::size_t pos_ = 0;
};

struct Header {
    int magic = 0;  // 2, 3, 5 or 6
    int width = 0;
    int height = 0;
    long maxval = 0;
    int channels() const { return (magic == 3 || magic == 6) ? 3 : 1; }
    bool binary() const { return magic == 5 || magic == 6; }
};

inline Header parse_header(Scanner& sc) {
    sc.skip_separators();
    if (sc.at_end() || sc.data()[sc.pos()] != 'P') sc.fail("unsupported magic number");
    sc.advance(1);
    if (sc.at_end()) sc.fail("unsupported magic number");
    const char m = sc.data()[sc.pos()];
    if (m != '2' && m != '3' && m != '5' && m != '6') sc.fail("unsupported magic number");
    sc.advance(1);

    Header h;
    h.magic = m - '0';
    h.width = static_cast<int>(sc.next_int("width"));
    h.height = static_cast<int>(sc.next_int("height"));
    h.maxval = sc.next_int("maxval");
    if (h.width < 1 || h.height < 1) sc.fail("dimensions must be >= 1");
    if (h.maxval < 1 || h.maxval > 65535) sc.fail("maxval outside [1, 65535]");
    return h;
}

inline std::vector<double> parse_raster(Scanner& sc, const Header& h) {
    const std::size_t samples =
        static_cast<std::size_t>(h.width) * h.height * h.channels();
    std::vector<double> values;
    values.reserve(samples);
    const double inv = 1.0 / static_cast<double>(h.maxval);

    if (h.binary()) {
        sc.consume_raster_separator();
        const int bytes_per_sample = h.maxval > 255 ? 2 : 1;
        const std::string& data = sc.data();
        for (std::size_t s = 0; s < samples; ++s) {
            if (sc.pos() + bytes_per_sample > data.size()) {
                sc.fail("truncated raster");
            }
            long raw;
            if (bytes_per_sample == 1) {
                raw = static_cast<unsigned char>(data[sc.pos()]);
            } else {
                raw = (static_cast<long>(static_cast<unsigned char>(data[sc.pos()])) << 8) |
                      static_cast<unsigned char>(data[sc.pos() + 1]);
            }
            sc.advance(static_cast<std::size_t>(bytes_per_sample));
            if (raw > h.maxval) sc.fail("sample exceeds maxval");
            values.push_back(static_cast<double>(raw) * inv);
        }
    } else {
        for (std::size_t s = 0; s < samples; ++s) {
            const long raw = sc.next_int("sample");
            if (raw > h.maxval) sc.fail("sample exceeds maxval");
            values.push_back(static_cast<double>(raw) * inv);
        }
    }
    return values;
}

inline void write_file_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError(path + ": cannot open for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.good()) {
        throw DataError(path + ": write failure");
    }
}

}  // namespace netpbm_detail

/// Loads a PGM (P2/P5) or PPM (P3/P6) file, maxval <= 65535. Samples are
/// scaled to [0,1] by division by maxval; channels = 1 for PGM, 3 for PPM.
inline Image load_image(const std::string& path) {
    const std::string data = netpbm_detail::read_file_bytes(path);
    netpbm_detail::Scanner sc(data, path);
    const netpbm_detail::Header h = netpbm_detail::parse_header(sc);
    std::vector<double> values = netpbm_detail::parse_raster(sc, h);
    return Image(h.width, h.height, h.channels(), std::move(values));
}

/// Loads a single-channel PGM as a saliency map; PPM input is rejected.
inline SaliencyMap load_map(const std::string& path) {
    const std::string data = netpbm_detail::read_file_bytes(path);
    netpbm_detail::Scanner sc(data, path);
    const netpbm_detail::Header h = netpbm_detail::parse_header(sc);
    if (h.channels() != 1) {
        throw DataError(path + ": expected single-channel PGM, got PPM");
    }
    std::vector<double> values = netpbm_detail::parse_raster(sc, h);
    return SaliencyMap(h.width, h.height, std::move(values));
}

/// v -> round(v * 255), round-half-up.
inline int quantize255(double v) {
    return static_cast<int>(std::lround(v * 255.0));
}

/// Writes a binary PGM (P5), maxval 255.
inline void save_map(const SaliencyMap& map, const std::string& path) {
    std::string out = "P5\n" + std::to_string(map.width()) + " " +
                      std::to_string(map.height()) + "\n255\n";
    out.reserve(out.size() + static_cast<std::size_t>(map.size()));
    for (int i = 0; i < map.size(); ++i) {
        out.push_back(static_cast<char>(static_cast<unsigned char>(quantize255(map[i]))));
    }
    netpbm_detail::write_file_bytes(path, out);
}

/// Writes a binary PGM (1 channel) or PPM (3 channels), maxval 255.
inline void save_image(const Image& img, const std::string& path) {
    if (img.channels() != 1 && img.channels() != 3) {
        throw DataError(path + ": only 1- or 3-channel images can be saved");
    }
    std::string out = (img.channels() == 1 ? "P5\n" : "P6\n") + std::to_string(img.width()) +
                      " " + std::to_string(img.height()) + "\n255\n";
    out.reserve(out.size() + img.values().size());
    for (double v : img.values()) {
        out.push_back(static_cast<char>(static_cast<unsigned char>(quantize255(v))));
    }
    netpbm_detail::write_file_bytes(path, out);
}

/// Full-precision plain-text sidecar format for lossless map handoff.
/// Line 1: "SMAP <width> <height>", then one %.17g value per line.
inline void save_map_text(const SaliencyMap& map, const std::string& path) {
    std::string out = "SMAP " + std::to_string(map.width()) + " " +
                      std::to_string(map.height()) + "\n";
    char buf[64];
    for (int i = 0; i < map.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", map[i]);
        out += buf;
    }
    netpbm_detail::write_file_bytes(path, out);
}

inline SaliencyMap load_map_text(const std::string& path) {
    const std::string data = netpbm_detail::read_file_bytes(path);
    std::istringstream in(data);
    std::string tag;
    int width = 0, height = 0;
    if (!(in >> tag >> width >> height) || tag != "SMAP") {
        throw DataError(path + ": not a SMAP sidecar file");
    }
    if (width < 1 || height < 1) {
        throw DataError(path + ": bad sidecar dimensions");
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(width) * height);
    double v;
    while (in >> v) values.push_back(v);
    if (values.size() != static_cast<std::size_t>(width) * height) {
        throw DataError(path + ": sidecar value count mismatch");
    }
    return SaliencyMap(width, height, std::move(values));
}

}  // namespace usal
