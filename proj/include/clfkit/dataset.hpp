#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "clfkit/image.hpp"
#include "clfkit/pnm.hpp"
#include "clfkit/rng.hpp"

namespace clfkit {

/// Labeled images with a disjoint train/test partition.
struct Dataset {
    int num_classes = 0;
    std::vector<LabeledImage> train;
    std::vector<LabeledImage> test;
};

/// Balanced synthetic classification task at desk scale.
///
/// Class k is a horizontal sinusoidal grating whose spatial frequency grows
/// geometrically with k, plus per-image phase and amplitude jitter and pixel
/// noise. Frequency survives modest rotation, shifting, zooming and flips,
/// so the class signal is stable under the augmentation policy while raw
/// pixels still vary enough that the task is not linearly trivial.
///
/// per_class images are generated for each class; the first 80% go to the
/// train split and the rest to the test split. The train split interleaves
/// classes round-robin so that cyclic batches stay balanced.
inline Dataset synth_dataset(int num_classes, int per_class, std::uint64_t seed,
                             int image_size = 16) {
    if (num_classes < 2) {
        throw std::invalid_argument("synth_dataset: need at least 2 classes");
    }
    if (per_class < 2) {
        throw std::invalid_argument("synth_dataset: need at least 2 images per class");
    }
    if (image_size < 4) {
        throw std::invalid_argument("synth_dataset: image_size must be at least 4");
    }

    const double max_freq = image_size / 2.0 - 1.0;
    const double ratio =
        num_classes > 1 ? std::min(2.0, std::pow(max_freq, 1.0 / (num_classes - 1))) : 1.0;

    const int train_per_class = std::max(1, per_class * 4 / 5);

    // grid[k][i] = i-th image of class k
    std::vector<std::vector<ImageBuffer>> grid(num_classes);
    for (int k = 0; k < num_classes; ++k) {
        const double freq = std::pow(ratio, k);
        grid[k].reserve(per_class);
        for (int i = 0; i < per_class; ++i) {
            Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i));
            const double phase = rng.uniform(-0.6, 0.6);
            const double amp = rng.uniform(0.30, 0.45);
            ImageBuffer img = make_image(image_size, image_size, 1, ValueDomain::Unit);
            for (int r = 0; r < image_size; ++r) {
                const double wave = amp * std::sin(2.0 * 3.14159265358979323846 * freq *
                                                       (r + 0.5) / image_size +
                                                   phase);
                for (int c = 0; c < image_size; ++c) {
                    const double v = 0.5 + wave + 0.12 * rng.normal();
                    img.at(r, c, 0) = std::clamp(v, 0.0, 1.0);
                }
            }
            grid[k].push_back(std::move(img));
        }
    }

    Dataset ds;
    ds.num_classes = num_classes;
    for (int i = 0; i < train_per_class; ++i) {
        for (int k = 0; k < num_classes; ++k) {
            ds.train.push_back(LabeledImage{std::move(grid[k][i]), k});
        }
    }
    for (int i = train_per_class; i < per_class; ++i) {
        for (int k = 0; k < num_classes; ++k) {
            ds.test.push_back(LabeledImage{std::move(grid[k][i]), k});
        }
    }
    return ds;
}

/// Loads PPM/PGM images from class subdirectories (sorted lexicographically,
/// one class each), resizes them to image_size x image_size and normalizes to
/// the unit domain. Layout: <root>/<class-name>/*.ppm|*.pgm.
inline std::vector<LabeledImage> load_labeled_directory(const std::string& root, int image_size,
                                                        std::vector<std::string>* class_names_out =
                                                            nullptr) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) {
        throw std::runtime_error("dataset: not a directory: " + root);
    }
    std::vector<std::string> class_dirs;
    for (const fs::directory_entry& e : fs::directory_iterator(root)) {
        if (e.is_directory()) {
            class_dirs.push_back(e.path().filename().string());
        }
    }
    std::sort(class_dirs.begin(), class_dirs.end());
    if (class_dirs.empty()) {
        throw std::runtime_error("dataset: no class subdirectories in " + root);
    }
    std::vector<LabeledImage> items;
    for (std::size_t k = 0; k < class_dirs.size(); ++k) {
        std::vector<std::string> files;
        for (const fs::directory_entry& e : fs::directory_iterator(fs::path(root) / class_dirs[k])) {
            const std::string ext = e.path().extension().string();
            if (e.is_regular_file() && (ext == ".ppm" || ext == ".pgm")) {
                files.push_back(e.path().string());
            }
        }
        std::sort(files.begin(), files.end());
        for (const std::string& f : files) {
            ImageBuffer img = read_pnm(f);
            img = resize_nearest(img, image_size, image_size);
            items.push_back(LabeledImage{normalize(img), static_cast<int>(k)});
        }
    }
    if (items.empty()) {
        throw std::runtime_error("dataset: no .ppm/.pgm files under " + root);
    }
    if (class_names_out != nullptr) {
        *class_names_out = class_dirs;
    }
    return items;
}

}  // namespace clfkit
