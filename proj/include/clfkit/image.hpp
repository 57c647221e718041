#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace clfkit {

/// Which value range the pixels of an ImageBuffer live in.
enum class ValueDomain : std::uint8_t {
    U8,    ///< integral values in {0..255}
    Unit,  ///< real values in [0.0, 1.0]
};

/// Row-major, channel-interleaved raster.
///
/// Pixels are stored as doubles in both domains; 8-bit data stays integral so
/// it round-trips bit-exactly through every transform that only copies values.
struct ImageBuffer {
    int height = 0;
    int width = 0;
    int channels = 1;  // 1 or 3
    ValueDomain domain = ValueDomain::U8;
    std::vector<double> data;

    double& at(int r, int c, int ch) {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    double at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }

    std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }

    bool operator==(const ImageBuffer&) const = default;

    /// Throws std::invalid_argument if any structural invariant is broken.
    void validate() const {
        if (height < 1 || width < 1) {
            throw std::invalid_argument("ImageBuffer: dimensions must be at least 1x1");
        }
        if (channels != 1 && channels != 3) {
            throw std::invalid_argument("ImageBuffer: channel count must be 1 or 3");
        }
        if (data.size() != pixel_count() * channels) {
            throw std::invalid_argument("ImageBuffer: data length does not match dimensions");
        }
        for (const double v : data) {
            if (domain == ValueDomain::U8) {
                if (!(v >= 0.0 && v <= 255.0) || v != static_cast<double>(static_cast<int>(v))) {
                    throw std::invalid_argument("ImageBuffer: 8-bit values must be integers in [0,255]");
                }
            } else if (!(v >= 0.0 && v <= 1.0)) {
                throw std::invalid_argument("ImageBuffer: unit-domain values must lie in [0,1]");
            }
        }
    }
};

inline ImageBuffer make_image(int h, int w, int ch, ValueDomain domain, double fill = 0.0) {
    ImageBuffer img;
    img.height = h;
    img.width = w;
    img.channels = ch;
    img.domain = domain;
    img.data.assign(static_cast<std::size_t>(h) * w * ch, fill);
    img.validate();
    return img;
}

/// Image paired with its class index.
struct LabeledImage {
    ImageBuffer image;
    int label = 0;
};

/// Nearest-neighbor resize with the floor convention: output pixel (r, c)
/// copies input pixel (⌊r·h_in/out_h⌋, ⌊c·w_in/out_w⌋). Exact for integer
/// up/downscale factors and never invents pixel values.
inline ImageBuffer resize_nearest(const ImageBuffer& img, int out_h, int out_w) {
    if (out_h < 1 || out_w < 1) {
        throw std::invalid_argument("resize_nearest: output dimensions must be at least 1");
    }
    ImageBuffer out;
    out.height = out_h;
    out.width = out_w;
    out.channels = img.channels;
    out.domain = img.domain;
    out.data.resize(static_cast<std::size_t>(out_h) * out_w * img.channels);
    for (int r = 0; r < out_h; ++r) {
        const int sr = static_cast<int>(static_cast<std::int64_t>(r) * img.height / out_h);
        for (int c = 0; c < out_w; ++c) {
            const int sc = static_cast<int>(static_cast<std::int64_t>(c) * img.width / out_w);
            for (int ch = 0; ch < img.channels; ++ch) {
                out.at(r, c, ch) = img.at(sr, sc, ch);
            }
        }
    }
    return out;
}

/// Maps an 8-bit image into the unit domain, dividing every value by 255.
inline ImageBuffer normalize(const ImageBuffer& img) {
    if (img.domain != ValueDomain::U8) {
        throw std::logic_error("normalize: image is already unit-domain");
    }
    ImageBuffer out = img;
    out.domain = ValueDomain::Unit;
    for (double& v : out.data) {
        v /= 255.0;
    }
    return out;
}

/// Inverse of normalize: unit-domain values scaled by 255 and rounded.
inline ImageBuffer denormalize(const ImageBuffer& img) {
    if (img.domain != ValueDomain::Unit) {
        throw std::logic_error("denormalize: image is not unit-domain");
    }
    ImageBuffer out = img;
    out.domain = ValueDomain::U8;
    for (double& v : out.data) {
        v = static_cast<double>(static_cast<int>(v * 255.0 + 0.5));
    }
    return out;
}

}  // namespace clfkit
