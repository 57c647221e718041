#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "clfkit/image.hpp"
#include "clfkit/rng.hpp"

namespace clfkit {

inline constexpr double kPi = 3.14159265358979323846;

/// Closed interval of zoom factors; zoom > 1 magnifies content.
struct ZoomRange {
    double lo = 0.8;
    double hi = 1.1;
};

/// Random-augmentation policy: symmetric ranges around the identity plus
/// coin-flip mirroring. Out-of-bounds samples are always filled by
/// nearest-pixel border replication; there is no other fill policy.
struct AugmentConfig {
    double rotation_deg = 30.0;      ///< angle drawn from [-rotation_deg, +rotation_deg]
    double width_shift_frac = 0.1;   ///< horizontal shift drawn from ±this fraction of width
    double height_shift_frac = 0.1;  ///< vertical shift drawn from ±this fraction of height
    double shear_intensity = 0.2;    ///< shear angle drawn from ±this many radians
    ZoomRange zoom_range{};
    bool hflip_enabled = true;
    bool vflip_enabled = true;

    void validate() const {
        if (rotation_deg < 0.0) {
            throw std::invalid_argument("AugmentConfig: rotation_deg must be >= 0");
        }
        if (width_shift_frac < 0.0 || width_shift_frac >= 1.0 || height_shift_frac < 0.0 ||
            height_shift_frac >= 1.0) {
            throw std::invalid_argument("AugmentConfig: shift fractions must lie in [0,1)");
        }
        if (shear_intensity < 0.0) {
            throw std::invalid_argument("AugmentConfig: shear_intensity must be >= 0");
        }
        if (!(zoom_range.lo > 0.0) || !(zoom_range.lo <= zoom_range.hi)) {
            throw std::invalid_argument("AugmentConfig: zoom range must satisfy 0 < lo <= hi");
        }
    }

    /// Zero-width ranges and flips off: every draw is the identity transform.
    static AugmentConfig identity() {
        AugmentConfig cfg;
        cfg.rotation_deg = 0.0;
        cfg.width_shift_frac = 0.0;
        cfg.height_shift_frac = 0.0;
        cfg.shear_intensity = 0.0;
        cfg.zoom_range = {1.0, 1.0};
        cfg.hflip_enabled = false;
        cfg.vflip_enabled = false;
        return cfg;
    }
};

/// One concrete draw from an AugmentConfig.
struct SampledTransform {
    double angle_deg = 0.0;
    double dx_frac = 0.0;  ///< positive moves content rightward
    double dy_frac = 0.0;  ///< positive moves content downward
    double shear_rad = 0.0;
    double zoom = 1.0;
    bool do_hflip = false;
    bool do_vflip = false;
};

/// 2x3 map from output pixel coordinates to input pixel coordinates:
///   in_row = m[0][0]*out_row + m[0][1]*out_col + b[0]
///   in_col = m[1][0]*out_row + m[1][1]*out_col + b[1]
struct AffineTransform {
    double m[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
    double b[2] = {0.0, 0.0};
};

/// Draws one transform. Draw order is fixed (angle, dx, dy, shear, zoom,
/// hflip, vflip); a disabled flip consumes no draw.
inline SampledTransform sample_params(const AugmentConfig& cfg, Rng& rng) {
    cfg.validate();
    SampledTransform t;
    t.angle_deg = rng.uniform(-cfg.rotation_deg, cfg.rotation_deg);
    t.dx_frac = rng.uniform(-cfg.width_shift_frac, cfg.width_shift_frac);
    t.dy_frac = rng.uniform(-cfg.height_shift_frac, cfg.height_shift_frac);
    t.shear_rad = rng.uniform(-cfg.shear_intensity, cfg.shear_intensity);
    t.zoom = rng.uniform(cfg.zoom_range.lo, cfg.zoom_range.hi);
    t.do_hflip = cfg.hflip_enabled && rng.coin();
    t.do_vflip = cfg.vflip_enabled && rng.coin();
    return t;
}

/// Realizes the sampled parameters as a single output->input matrix about the
/// image center. Forward order is rotation, then shear, then zoom, then
/// shift; the returned matrix is that composition inverted. Flips are not
/// part of the matrix — apply_transform handles them as exact reversals.
inline AffineTransform build_affine(const SampledTransform& t, int h, int w) {
    if (h < 1 || w < 1) {
        throw std::invalid_argument("build_affine: image dimensions must be at least 1");
    }
    if (t.zoom == 0.0) {
        throw std::invalid_argument("build_affine: zoom must be nonzero");
    }
    const double theta = t.angle_deg * kPi / 180.0;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double ss = std::sin(t.shear_rad);
    const double cs = std::cos(t.shear_rad);
    const double iz = 1.0 / t.zoom;

    // Inverse rotation in (row, col) coordinates, then inverse shear
    // [[1, -sin s], [0, cos s]], then inverse scale.
    AffineTransform a;
    a.m[0][0] = iz * ct;
    a.m[0][1] = iz * (ct * -ss + st * cs);
    a.m[1][0] = iz * -st;
    a.m[1][1] = iz * (st * ss + ct * cs);

    const double center_r = (h - 1) / 2.0;
    const double center_c = (w - 1) / 2.0;
    const double shift_r = t.dy_frac * h;
    const double shift_c = t.dx_frac * w;
    // in = A * (out - center - shift) + center
    a.b[0] = center_r - (a.m[0][0] * (center_r + shift_r) + a.m[0][1] * (center_c + shift_c));
    a.b[1] = center_c - (a.m[1][0] * (center_r + shift_r) + a.m[1][1] * (center_c + shift_c));
    return a;
}

/// Resamples with nearest-neighbor rounding; coordinates that fall outside
/// the input are clamped to the closest border pixel. Output dimensions and
/// value domain always equal the input's.
inline ImageBuffer apply_affine(const ImageBuffer& img, const AffineTransform& t) {
    if (img.data.empty()) {
        throw std::invalid_argument("apply_affine: empty image");
    }
    for (int i = 0; i < 2; ++i) {
        if (!std::isfinite(t.b[i]) || !std::isfinite(t.m[i][0]) || !std::isfinite(t.m[i][1])) {
            throw std::invalid_argument("apply_affine: non-finite transform entries");
        }
    }
    ImageBuffer out = img;
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const double in_r = t.m[0][0] * r + t.m[0][1] * c + t.b[0];
            const double in_c = t.m[1][0] * r + t.m[1][1] * c + t.b[1];
            long sr = std::lround(in_r);
            long sc = std::lround(in_c);
            if (sr < 0) sr = 0;
            if (sr >= img.height) sr = img.height - 1;
            if (sc < 0) sc = 0;
            if (sc >= img.width) sc = img.width - 1;
            for (int ch = 0; ch < img.channels; ++ch) {
                out.at(r, c, ch) = img.at(static_cast<int>(sr), static_cast<int>(sc), ch);
            }
        }
    }
    return out;
}

/// Exact column reversal.
inline ImageBuffer flip_h(const ImageBuffer& img) {
    if (img.data.empty()) {
        throw std::invalid_argument("flip_h: empty image");
    }
    ImageBuffer out = img;
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            for (int ch = 0; ch < img.channels; ++ch) {
                out.at(r, c, ch) = img.at(r, img.width - 1 - c, ch);
            }
        }
    }
    return out;
}

/// Exact row reversal.
inline ImageBuffer flip_v(const ImageBuffer& img) {
    if (img.data.empty()) {
        throw std::invalid_argument("flip_v: empty image");
    }
    ImageBuffer out = img;
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            for (int ch = 0; ch < img.channels; ++ch) {
                out.at(r, c, ch) = img.at(img.height - 1 - r, c, ch);
            }
        }
    }
    return out;
}

/// Full augmentation of one image: flips first (exact), then the affine
/// resample. An identity draw returns a bit-identical copy.
inline ImageBuffer apply_transform(const ImageBuffer& img, const SampledTransform& t) {
    ImageBuffer work = img;
    if (t.do_hflip) {
        work = flip_h(work);
    }
    if (t.do_vflip) {
        work = flip_v(work);
    }
    return apply_affine(work, build_affine(t, img.height, img.width));
}

/// Unbounded deterministic stream of augmented samples cycling through a
/// dataset. Item i augments dataset[i % N] with the transform drawn from the
/// stream keyed by (seed, epoch = i / N, index = i % N), so items can be
/// produced in any order — or concurrently — with identical results.
class AugmentStream {
  public:
    AugmentStream(std::vector<LabeledImage> dataset, AugmentConfig config, std::uint64_t seed)
        : dataset_(std::move(dataset)), config_(config), seed_(seed) {
        if (dataset_.empty()) {
            throw std::invalid_argument("AugmentStream: dataset must not be empty");
        }
        config_.validate();
    }

    std::size_t dataset_size() const { return dataset_.size(); }

    /// Pure function of (seed, i); does not advance the cursor.
    LabeledImage item(std::uint64_t i) const {
        const std::uint64_t n = dataset_.size();
        const std::uint64_t epoch = i / n;
        const std::uint64_t index = i % n;
        Rng rng = Rng::derive(seed_, epoch, index);
        const SampledTransform t = sample_params(config_, rng);
        const LabeledImage& src = dataset_[static_cast<std::size_t>(index)];
        return LabeledImage{apply_transform(src.image, t), src.label};
    }

    LabeledImage next() { return item(cursor_++); }

  private:
    std::vector<LabeledImage> dataset_;
    AugmentConfig config_;
    std::uint64_t seed_;
    std::uint64_t cursor_ = 0;
};

}  // namespace clfkit
