#pragma once

#include <stdexcept>
#include <vector>

#include "clfkit/dataset.hpp"
#include "clfkit/metrics.hpp"
#include "clfkit/model.hpp"
#include "clfkit/trainer.hpp"

namespace clfkit {

/// Snapshots sharing one model shape, combined at inference time.
struct SnapshotSet {
    MlpModel shape;  ///< layer layout; parameters are irrelevant here
    std::vector<Snapshot> snapshots;

    void validate() const {
        shape.validate();
        if (snapshots.empty()) {
            throw std::invalid_argument("SnapshotSet: needs at least one snapshot");
        }
        for (const Snapshot& s : snapshots) {
            if (s.parameters.size() != shape.parameter_count()) {
                throw std::invalid_argument("SnapshotSet: snapshot parameter count mismatch");
            }
        }
    }
};

struct EnsemblePrediction {
    std::vector<int> classes;          ///< per-sample argmax of the mean
    std::vector<double> probabilities; ///< count x num_classes, mean softmax
};

/// Unweighted softmax averaging: the per-class probability is the arithmetic
/// mean over snapshots, and the prediction its argmax with ties broken toward
/// the lowest class index. Snapshot order cannot change the result.
inline EnsemblePrediction ensemble_predict(const SnapshotSet& set, const Batch& batch) {
    set.validate();
    const int num_classes = set.shape.num_classes();
    EnsemblePrediction pred;
    pred.probabilities.assign(static_cast<std::size_t>(batch.count) * num_classes, 0.0);

    MlpModel scratch = set.shape;
    for (const Snapshot& s : set.snapshots) {
        scratch.load_parameters(s.parameters);
        const std::vector<double> probs = forward(scratch, batch);
        for (std::size_t i = 0; i < probs.size(); ++i) {
            pred.probabilities[i] += probs[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(set.snapshots.size());
    for (double& p : pred.probabilities) {
        p *= inv;
    }

    pred.classes.resize(batch.count);
    for (int r = 0; r < batch.count; ++r) {
        const double* row = pred.probabilities.data() + static_cast<std::size_t>(r) * num_classes;
        int best = 0;
        for (int j = 1; j < num_classes; ++j) {
            if (row[j] > row[best]) {
                best = j;
            }
        }
        pred.classes[r] = best;
    }
    return pred;
}

/// Confusion matrix of the ensemble over a labeled test set
/// (rows = predicted, columns = actual).
inline ConfusionMatrix evaluate(const SnapshotSet& set, const std::vector<LabeledImage>& test) {
    if (test.empty()) {
        throw std::invalid_argument("evaluate: empty test set");
    }
    const Batch batch = make_batch(test);
    const EnsemblePrediction pred = ensemble_predict(set, batch);
    ConfusionMatrix cm = make_confusion(index_labels(set.shape.num_classes()));
    for (int i = 0; i < batch.count; ++i) {
        ++cm.at(pred.classes[i], batch.labels[i]);
    }
    return cm;
}

}  // namespace clfkit
