#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clfkit/augment.hpp"
#include "clfkit/dataset.hpp"
#include "clfkit/model.hpp"
#include "clfkit/optim.hpp"

namespace clfkit {

/// Settings shared by both training procedures. Epochs are streaming epochs:
/// one epoch is ⌈N/batch_size⌉ batches drawn from the augmentation stream,
/// N being the train-split size.
struct TrainConfig {
    int batch_size = 16;
    std::uint64_t seed = 0;

    // two-phase procedure
    int phase1_epochs = 5;     ///< Adam, head layer only
    double adam_lr = 0.001;
    int phase2_epochs = 17;    ///< SGD momentum, all layers
    double phase2_lr = 0.0001;

    double momentum = 0.9;     ///< SGD momentum for phase 2 and snapshot mode

    void validate() const {
        if (batch_size < 1) {
            throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
        }
        if (phase1_epochs < 1 || phase2_epochs < 1) {
            throw std::invalid_argument("TrainConfig: epoch counts must be >= 1");
        }
    }
};

struct EpochStats {
    int epoch = 0;       ///< 1-based, global across phases
    double lr = 0.0;     ///< learning rate used during this epoch
    double train_loss = 0.0;  ///< mean loss over the epoch's augmented batches
    double test_loss = 0.0;   ///< loss on the clean test split after the epoch
};

using LossTrace = std::vector<EpochStats>;

/// Model parameters captured at the end of one epoch.
struct Snapshot {
    int epoch = 0;
    std::vector<double> parameters;
    double train_loss = 0.0;
};

namespace detail {

inline double dataset_loss(const MlpModel& model, const std::vector<LabeledImage>& items) {
    const Batch b = make_batch(items);
    return cross_entropy(forward(model, b), b.labels, model.num_classes());
}

/// Runs one streaming epoch; step() is called once per batch with the flat
/// gradient. Returns the mean batch loss.
template <typename StepFn>
double run_epoch(MlpModel& model, AugmentStream& stream, int batch_size, StepFn&& step) {
    const int n = static_cast<int>(stream.dataset_size());
    const int batches = (n + batch_size - 1) / batch_size;
    double loss_sum = 0.0;
    int consumed = 0;
    for (int b = 0; b < batches; ++b) {
        const int take = std::min(batch_size, n - consumed);
        consumed += take;
        std::vector<LabeledImage> items;
        items.reserve(take);
        for (int i = 0; i < take; ++i) {
            items.push_back(stream.next());
        }
        const Batch batch = make_batch(items);
        const BackwardResult grads = backward(model, batch);
        loss_sum += grads.loss;
        std::vector<double> params = model.flatten_parameters();
        step(params, grads.flatten());
        model.load_parameters(params);
    }
    return loss_sum / batches;
}

}  // namespace detail

/// Transfer-learning style procedure: phase 1 trains only the head layer
/// with Adam while the backbone is frozen; phase 2 unfreezes everything and
/// fine-tunes with small-step SGD momentum. Returns the per-epoch loss trace;
/// the model is trained in place.
inline LossTrace train_two_phase(MlpModel& model, const Dataset& data, const AugmentConfig& aug,
                                 const TrainConfig& cfg) {
    cfg.validate();
    model.validate();
    AugmentStream stream(data.train, aug, cfg.seed);

    LossTrace trace;
    int epoch = 0;

    model.set_backbone_frozen(true);
    Adam adam(model.parameter_count(), cfg.adam_lr);
    for (int e = 0; e < cfg.phase1_epochs; ++e) {
        const double train_loss = detail::run_epoch(
            model, stream, cfg.batch_size,
            [&](std::span<double> p, const std::vector<double>& g) { adam.step(p, g); });
        ++epoch;
        trace.push_back(EpochStats{epoch, cfg.adam_lr, train_loss,
                                   detail::dataset_loss(model, data.test)});
    }

    model.set_backbone_frozen(false);
    SgdMomentum sgd(cfg.phase2_lr, cfg.momentum, model.parameter_count());
    for (int e = 0; e < cfg.phase2_epochs; ++e) {
        const double train_loss = detail::run_epoch(
            model, stream, cfg.batch_size,
            [&](std::span<double> p, const std::vector<double>& g) { sgd.step(p, g); });
        ++epoch;
        trace.push_back(EpochStats{epoch, cfg.phase2_lr, train_loss,
                                   detail::dataset_loss(model, data.test)});
    }
    return trace;
}

struct SnapshotRun {
    std::vector<Snapshot> snapshots;
    LossTrace trace;
};

/// Cosine-annealed training that captures a snapshot at the end of every
/// schedule cycle (and at the final epoch). All layers train; the momentum
/// buffer persists across cycles.
inline SnapshotRun train_snapshot(MlpModel& model, const Dataset& data, const AugmentConfig& aug,
                                  const ScheduleConfig& schedule, const TrainConfig& cfg) {
    cfg.validate();
    schedule.validate();
    model.validate();
    AugmentStream stream(data.train, aug, cfg.seed);
    const std::vector<int> capture_at = snapshot_epochs(schedule);

    SnapshotRun run;
    SgdMomentum sgd(schedule.alpha0, cfg.momentum, model.parameter_count());
    for (int t = 1; t <= schedule.total_epochs; ++t) {
        sgd.lr = lr_at(schedule, t);
        const double train_loss = detail::run_epoch(
            model, stream, cfg.batch_size,
            [&](std::span<double> p, const std::vector<double>& g) { sgd.step(p, g); });
        run.trace.push_back(
            EpochStats{t, sgd.lr, train_loss, detail::dataset_loss(model, data.test)});
        if (std::find(capture_at.begin(), capture_at.end(), t) != capture_at.end()) {
            run.snapshots.push_back(Snapshot{t, model.flatten_parameters(), train_loss});
        }
    }
    return run;
}

namespace detail {
inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}
}  // namespace detail

/// epoch,train_loss,test_loss rows, one per epoch.
inline void write_loss_trace_csv(std::ostream& out, const LossTrace& trace) {
    for (const EpochStats& s : trace) {
        out << s.epoch << "," << detail::format_double(s.train_loss) << ","
            << detail::format_double(s.test_loss) << "\n";
    }
}

inline void write_loss_trace_csv(const std::string& path, const LossTrace& trace) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    write_loss_trace_csv(out, trace);
}

}  // namespace clfkit
