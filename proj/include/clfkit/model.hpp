#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clfkit/image.hpp"
#include "clfkit/rng.hpp"

namespace clfkit {

enum class Activation : std::uint8_t {
    None = 0,
    Relu = 1,
};

/// One dense layer. A frozen layer receives zero gradients, so its
/// parameters never move.
struct Layer {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> weights;  // out_dim x in_dim, row-major
    std::vector<double> bias;     // out_dim
    Activation activation = Activation::None;
    bool frozen = false;
};

/// Dense feed-forward classifier; the last layer's logits feed a softmax.
struct MlpModel {
    std::vector<Layer> layers;

    int input_dim() const { return layers.front().in_dim; }
    int num_classes() const { return layers.back().out_dim; }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const Layer& l : layers) {
            n += l.weights.size() + l.bias.size();
        }
        return n;
    }

    /// Fixed flatten order: per layer, weights row-major then bias.
    std::vector<double> flatten_parameters() const {
        std::vector<double> flat;
        flat.reserve(parameter_count());
        for (const Layer& l : layers) {
            flat.insert(flat.end(), l.weights.begin(), l.weights.end());
            flat.insert(flat.end(), l.bias.begin(), l.bias.end());
        }
        return flat;
    }

    void load_parameters(std::span<const double> flat) {
        if (flat.size() != parameter_count()) {
            throw std::invalid_argument("MlpModel::load_parameters: size mismatch");
        }
        std::size_t off = 0;
        for (Layer& l : layers) {
            std::copy_n(flat.begin() + off, l.weights.size(), l.weights.begin());
            off += l.weights.size();
            std::copy_n(flat.begin() + off, l.bias.size(), l.bias.begin());
            off += l.bias.size();
        }
    }

    /// Freeze mask for the two-phase procedure: everything except the final
    /// (head) layer.
    void set_backbone_frozen(bool frozen) {
        for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
            layers[i].frozen = frozen;
        }
    }

    void validate() const {
        if (layers.empty()) {
            throw std::invalid_argument("MlpModel: needs at least one layer");
        }
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const Layer& l = layers[i];
            if (l.in_dim < 1 || l.out_dim < 1 ||
                l.weights.size() != static_cast<std::size_t>(l.in_dim) * l.out_dim ||
                l.bias.size() != static_cast<std::size_t>(l.out_dim)) {
                throw std::invalid_argument("MlpModel: malformed layer " + std::to_string(i));
            }
            if (i + 1 < layers.size() && l.out_dim != layers[i + 1].in_dim) {
                throw std::invalid_argument("MlpModel: layer dimensions do not compose");
            }
        }
        if (layers.back().activation != Activation::None) {
            throw std::invalid_argument("MlpModel: final layer must be linear (softmax follows)");
        }
    }
};

/// He-style initialization, deterministic in the seed.
inline MlpModel make_mlp(int input_dim, const std::vector<int>& hidden, int num_classes,
                         std::uint64_t seed) {
    if (input_dim < 1 || num_classes < 2) {
        throw std::invalid_argument("make_mlp: need input_dim >= 1 and num_classes >= 2");
    }
    MlpModel model;
    std::vector<int> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(num_classes);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        Layer l;
        l.in_dim = dims[i];
        l.out_dim = dims[i + 1];
        l.activation = (i + 2 < dims.size()) ? Activation::Relu : Activation::None;
        l.weights.resize(static_cast<std::size_t>(l.in_dim) * l.out_dim);
        l.bias.assign(l.out_dim, 0.0);
        Rng rng = Rng::derive(seed, 0xC1F5, i);
        const double scale = std::sqrt(2.0 / l.in_dim);
        for (double& w : l.weights) {
            w = scale * rng.normal();
        }
        model.layers.push_back(std::move(l));
    }
    model.validate();
    return model;
}

/// Flattened batch: `count` rows of `dim` features plus one label per row.
struct Batch {
    int count = 0;
    int dim = 0;
    std::vector<double> inputs;  // count x dim, row-major
    std::vector<int> labels;     // count
};

inline Batch make_batch(std::span<const LabeledImage> items) {
    if (items.empty()) {
        throw std::invalid_argument("make_batch: empty item list");
    }
    Batch b;
    b.count = static_cast<int>(items.size());
    b.dim = static_cast<int>(items.front().image.data.size());
    b.inputs.reserve(static_cast<std::size_t>(b.count) * b.dim);
    for (const LabeledImage& it : items) {
        if (static_cast<int>(it.image.data.size()) != b.dim) {
            throw std::invalid_argument("make_batch: images differ in size");
        }
        b.inputs.insert(b.inputs.end(), it.image.data.begin(), it.image.data.end());
        b.labels.push_back(it.label);
    }
    return b;
}

namespace detail {

inline void softmax_rows(std::vector<double>& logits, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        double* row = logits.data() + static_cast<std::size_t>(r) * cols;
        const double mx = *std::max_element(row, row + cols);
        double sum = 0.0;
        for (int j = 0; j < cols; ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (int j = 0; j < cols; ++j) {
            row[j] /= sum;
        }
    }
}

struct ForwardPass {
    // activations[0] is the input batch, activations[i] the output of layer
    // i-1 after its activation; the last entry holds softmax probabilities.
    std::vector<std::vector<double>> activations;
};

inline ForwardPass forward_full(const MlpModel& model, const Batch& batch) {
    model.validate();
    if (batch.dim != model.input_dim()) {
        throw std::invalid_argument("forward: batch dimension does not match model input");
    }
    if (batch.count < 1 || batch.labels.size() != static_cast<std::size_t>(batch.count)) {
        throw std::invalid_argument("forward: malformed batch");
    }
    ForwardPass fp;
    fp.activations.push_back(batch.inputs);
    const int n = batch.count;
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const Layer& l = model.layers[li];
        const std::vector<double>& in = fp.activations.back();
        std::vector<double> out(static_cast<std::size_t>(n) * l.out_dim);
        for (int r = 0; r < n; ++r) {
            const double* x = in.data() + static_cast<std::size_t>(r) * l.in_dim;
            double* y = out.data() + static_cast<std::size_t>(r) * l.out_dim;
            for (int j = 0; j < l.out_dim; ++j) {
                const double* w = l.weights.data() + static_cast<std::size_t>(j) * l.in_dim;
                double acc = l.bias[j];
                for (int k = 0; k < l.in_dim; ++k) {
                    acc += w[k] * x[k];
                }
                y[j] = (l.activation == Activation::Relu && acc < 0.0) ? 0.0 : acc;
            }
        }
        fp.activations.push_back(std::move(out));
    }
    softmax_rows(fp.activations.back(), n, model.num_classes());
    return fp;
}

}  // namespace detail

/// Softmax probabilities for a batch, count x num_classes row-major. Every
/// row is non-negative and sums to 1 within 1e-12.
inline std::vector<double> forward(const MlpModel& model, const Batch& batch) {
    return detail::forward_full(model, batch).activations.back();
}

inline constexpr double kProbFloor = 1e-12;

/// Mean categorical cross-entropy, −mean log p[true class], with the
/// probability floored at 1e-12 before the log.
inline double cross_entropy(std::span<const double> probs, std::span<const int> labels,
                            int num_classes) {
    if (labels.empty() || probs.size() != labels.size() * static_cast<std::size_t>(num_classes)) {
        throw std::invalid_argument("cross_entropy: shape mismatch");
    }
    double loss = 0.0;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        const int y = labels[r];
        if (y < 0 || y >= num_classes) {
            throw std::invalid_argument("cross_entropy: label out of range");
        }
        const double p = std::max(probs[r * num_classes + y], kProbFloor);
        loss -= std::log(p);
    }
    return loss / static_cast<double>(labels.size());
}

/// Per-layer gradients, same shapes as the layer parameters.
struct LayerGrads {
    std::vector<double> weights;
    std::vector<double> bias;
};

struct BackwardResult {
    std::vector<LayerGrads> layers;
    double loss = 0.0;

    /// Flattened in the model's parameter order.
    std::vector<double> flatten() const {
        std::vector<double> flat;
        for (const LayerGrads& g : layers) {
            flat.insert(flat.end(), g.weights.begin(), g.weights.end());
            flat.insert(flat.end(), g.bias.begin(), g.bias.end());
        }
        return flat;
    }
};

/// Analytic gradients of the mean cross-entropy over the batch. Frozen
/// layers get exact zeros.
inline BackwardResult backward(const MlpModel& model, const Batch& batch) {
    const detail::ForwardPass fp = detail::forward_full(model, batch);
    const int n = batch.count;
    const int num_classes = model.num_classes();
    const std::vector<double>& probs = fp.activations.back();

    BackwardResult result;
    result.loss = cross_entropy(probs, batch.labels, num_classes);
    result.layers.resize(model.layers.size());

    // dL/dlogits = (softmax - onehot) / n
    std::vector<double> delta = probs;
    for (int r = 0; r < n; ++r) {
        delta[static_cast<std::size_t>(r) * num_classes + batch.labels[r]] -= 1.0;
    }
    for (double& d : delta) {
        d /= static_cast<double>(n);
    }

    for (int li = static_cast<int>(model.layers.size()) - 1; li >= 0; --li) {
        const Layer& l = model.layers[li];
        const std::vector<double>& in = fp.activations[li];
        LayerGrads& g = result.layers[li];
        g.weights.assign(l.weights.size(), 0.0);
        g.bias.assign(l.bias.size(), 0.0);
        if (!l.frozen) {
            for (int r = 0; r < n; ++r) {
                const double* x = in.data() + static_cast<std::size_t>(r) * l.in_dim;
                const double* d = delta.data() + static_cast<std::size_t>(r) * l.out_dim;
                for (int j = 0; j < l.out_dim; ++j) {
                    double* gw = g.weights.data() + static_cast<std::size_t>(j) * l.in_dim;
                    for (int k = 0; k < l.in_dim; ++k) {
                        gw[k] += d[j] * x[k];
                    }
                    g.bias[j] += d[j];
                }
            }
        }
        if (li == 0) {
            break;
        }
        // Propagate delta to the previous layer's output, applying the ReLU
        // mask of that layer (its activations are already rectified).
        std::vector<double> prev(static_cast<std::size_t>(n) * l.in_dim, 0.0);
        for (int r = 0; r < n; ++r) {
            const double* d = delta.data() + static_cast<std::size_t>(r) * l.out_dim;
            double* pd = prev.data() + static_cast<std::size_t>(r) * l.in_dim;
            for (int j = 0; j < l.out_dim; ++j) {
                const double* w = l.weights.data() + static_cast<std::size_t>(j) * l.in_dim;
                for (int k = 0; k < l.in_dim; ++k) {
                    pd[k] += d[j] * w[k];
                }
            }
        }
        const Layer& below = model.layers[li - 1];
        if (below.activation == Activation::Relu) {
            const std::vector<double>& act = fp.activations[li];
            for (std::size_t i = 0; i < prev.size(); ++i) {
                if (act[i] <= 0.0) {
                    prev[i] = 0.0;
                }
            }
        }
        delta = std::move(prev);
    }
    return result;
}

/// Central-difference check of backward over a strided subset of parameters.
/// Returns the worst relative error, |g − fd| / max(|g|, |fd|, 1e-6).
inline double grad_check(const MlpModel& model, const Batch& batch, double h,
                         int max_params_per_layer = 24) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("grad_check: h must be positive");
    }
    const BackwardResult analytic = backward(model, batch);
    const std::vector<double> base = model.flatten_parameters();
    const std::vector<double> grads = analytic.flatten();

    MlpModel probe = model;
    double worst = 0.0;
    std::size_t layer_off = 0;
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const Layer& l = model.layers[li];
        const std::size_t layer_size = l.weights.size() + l.bias.size();
        if (!l.frozen) {
            const std::size_t stride =
                std::max<std::size_t>(1, layer_size / static_cast<std::size_t>(max_params_per_layer));
            for (std::size_t p = 0; p < layer_size; p += stride) {
                const std::size_t idx = layer_off + p;
                std::vector<double> perturbed = base;
                perturbed[idx] = base[idx] + h;
                probe.load_parameters(perturbed);
                const double up = cross_entropy(forward(probe, batch), batch.labels,
                                                model.num_classes());
                perturbed[idx] = base[idx] - h;
                probe.load_parameters(perturbed);
                const double down = cross_entropy(forward(probe, batch), batch.labels,
                                                  model.num_classes());
                const double fd = (up - down) / (2.0 * h);
                const double g = grads[idx];
                const double denom = std::max({std::abs(g), std::abs(fd), 1e-6});
                worst = std::max(worst, std::abs(g - fd) / denom);
            }
        }
        layer_off += layer_size;
    }
    return worst;
}

}  // namespace clfkit
