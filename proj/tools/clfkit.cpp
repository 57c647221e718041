// clfkit — one reproducible command-line toolchain for the pipeline:
// seeded augmentation, cosine-annealed snapshot training, ensemble
// evaluation and confusion-matrix reporting. Every command is a
// deterministic function of its config and seed.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clfkit/clfkit.hpp"

namespace fs = std::filesystem;
using clfkit::json;

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot hash " + path);
    }
    std::uint64_t h = 1469598103934665603ull;
    char chunk[4096];
    while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<std::uint8_t>(chunk[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return std::string(buf);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("failed writing " + path);
    }
}

// Manifest: the config that produced a run plus a hash per artifact, so a
// rerun can be verified byte for byte (created_at is the one exempt field).
void write_manifest(const std::string& out_dir, const json& config, std::uint64_t seed,
                    const std::vector<std::string>& artifact_names) {
    json artifacts = json::object();
    for (const std::string& name : artifact_names) {
        artifacts[name] = hex64(fnv1a64_file((fs::path(out_dir) / name).string()));
    }
    const json manifest{{"config", config},
                        {"seed", seed},
                        {"artifacts", artifacts},
                        {"created_at", utc_timestamp()}};
    write_text_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

clfkit::Dataset build_dataset(const clfkit::RunConfig& cfg) {
    if (cfg.dataset.type == "synthetic") {
        return clfkit::synth_dataset(cfg.dataset.classes, cfg.dataset.per_class, cfg.seed,
                                     cfg.dataset.image_size);
    }
    clfkit::Dataset ds;
    std::vector<std::string> train_classes;
    std::vector<std::string> test_classes;
    ds.train = clfkit::load_labeled_directory(cfg.dataset.train_path, cfg.dataset.image_size,
                                              &train_classes);
    ds.test = clfkit::load_labeled_directory(cfg.dataset.test_path, cfg.dataset.image_size,
                                             &test_classes);
    if (train_classes != test_classes) {
        throw std::runtime_error("dataset: train and test class directories differ");
    }
    ds.num_classes = static_cast<int>(train_classes.size());
    return ds;
}

std::string snapshot_filename(int epoch) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snapshot_e%03d.bin", epoch);
    return std::string(buf);
}

// --- subcommands -----------------------------------------------------------

int cmd_augment(const std::string& input, const std::string& out_dir,
                const std::string& config_path, int count, std::uint64_t seed) {
    clfkit::AugmentConfig cfg;
    if (!config_path.empty()) {
        cfg = clfkit::augment_config_from_json(clfkit::load_json_file(config_path));
    }
    const clfkit::ImageBuffer img = clfkit::read_pnm(input);
    fs::create_directories(out_dir);
    const std::string stem = fs::path(input).stem().string();
    const std::string ext = img.channels == 3 ? ".ppm" : ".pgm";
    for (int k = 0; k < count; ++k) {
        clfkit::Rng rng = clfkit::Rng::derive(seed, 0, static_cast<std::uint64_t>(k));
        const clfkit::SampledTransform t = clfkit::sample_params(cfg, rng);
        const clfkit::ImageBuffer aug = clfkit::apply_transform(img, t);
        const std::string out_path =
            (fs::path(out_dir) / (stem + "_aug" + std::to_string(k) + ext)).string();
        clfkit::write_pnm(out_path, aug);
        clfkit::read_pnm(out_path).validate();  // written artifact must parse back
    }
    std::cout << "wrote " << count << " augmented image(s) to " << out_dir << "\n";
    return 0;
}

int cmd_lr_trace(const std::string& config_path, const std::string& out_path) {
    const clfkit::ScheduleConfig cfg =
        clfkit::schedule_config_from_json(clfkit::load_json_file(config_path));
    const std::vector<int> marks = clfkit::snapshot_epochs(cfg);
    std::string csv;
    for (int t = 1; t <= cfg.total_epochs; ++t) {
        const bool snap = std::find(marks.begin(), marks.end(), t) != marks.end();
        csv += std::to_string(t) + "," + format_double(clfkit::lr_at(cfg, t)) + "," +
               (snap ? "1" : "0") + "\n";
    }
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        write_text_file(out_path, csv);
    }
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& out_override,
              std::int64_t seed_override) {
    const json config_json = clfkit::load_json_file(config_path);
    clfkit::RunConfig cfg = clfkit::run_config_from_json(config_json);
    if (!out_override.empty()) {
        cfg.out_dir = out_override;
    }
    if (seed_override >= 0) {
        cfg.seed = static_cast<std::uint64_t>(seed_override);
        cfg.train.seed = cfg.seed;
    }
    if (cfg.out_dir.empty()) {
        throw std::runtime_error("train: no output directory (config out_dir or --out)");
    }
    fs::create_directories(cfg.out_dir);

    const clfkit::Dataset data = build_dataset(cfg);
    const int input_dim = static_cast<int>(data.train.front().image.data.size());
    clfkit::MlpModel model =
        clfkit::make_mlp(input_dim, {cfg.hidden_width}, data.num_classes, cfg.seed);

    std::vector<std::string> artifacts;
    clfkit::LossTrace trace;
    if (cfg.mode == "snapshot") {
        clfkit::SnapshotRun run =
            clfkit::train_snapshot(model, data, cfg.augment, cfg.schedule, cfg.train);
        trace = std::move(run.trace);
        for (const clfkit::Snapshot& s : run.snapshots) {
            const std::string name = snapshot_filename(s.epoch);
            clfkit::save_snapshot((fs::path(cfg.out_dir) / name).string(), s, model, cfg.seed);
            artifacts.push_back(name);
        }
    } else {
        trace = clfkit::train_two_phase(model, data, cfg.augment, cfg.train);
        clfkit::Snapshot final_snap{trace.back().epoch, model.flatten_parameters(),
                                    trace.back().train_loss};
        const std::string name = snapshot_filename(final_snap.epoch);
        clfkit::save_snapshot((fs::path(cfg.out_dir) / name).string(), final_snap, model,
                              cfg.seed);
        artifacts.push_back(name);
    }
    {
        std::ostringstream csv;
        clfkit::write_loss_trace_csv(csv, trace);
        write_text_file((fs::path(cfg.out_dir) / "loss_trace.csv").string(), csv.str());
        artifacts.push_back("loss_trace.csv");
    }
    write_manifest(cfg.out_dir, config_json, cfg.seed, artifacts);
    std::cout << "trained " << cfg.mode << " run into " << cfg.out_dir << " ("
              << artifacts.size() - 1 << " snapshot file(s))\n";
    return 0;
}

clfkit::SnapshotSet load_snapshot_dir(const std::string& dir) {
    std::vector<std::string> files;
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("not a directory: " + dir);
    }
    for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".bin") {
            files.push_back(e.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw std::runtime_error("no .bin snapshots in " + dir);
    }
    clfkit::SnapshotSet set;
    bool first = true;
    for (const std::string& f : files) {
        clfkit::SnapshotFile sf = clfkit::load_snapshot(f);
        if (first) {
            set.shape = sf.model;
            first = false;
        } else {
            const auto& a = set.shape.layers;
            const auto& b = sf.model.layers;
            bool same = a.size() == b.size();
            for (std::size_t i = 0; same && i < a.size(); ++i) {
                same = a[i].in_dim == b[i].in_dim && a[i].out_dim == b[i].out_dim &&
                       a[i].activation == b[i].activation;
            }
            if (!same) {
                throw std::runtime_error("snapshot shape mismatch: " + f);
            }
        }
        set.snapshots.push_back(std::move(sf.snapshot));
    }
    return set;
}

int cmd_evaluate(const std::string& snapshots_dir, const std::string& config_path,
                 const std::string& out_dir) {
    const clfkit::RunConfig cfg =
        clfkit::run_config_from_json(clfkit::load_json_file(config_path));
    const clfkit::SnapshotSet set = load_snapshot_dir(snapshots_dir);
    const clfkit::Dataset data = build_dataset(cfg);
    fs::create_directories(out_dir);

    const clfkit::ConfusionMatrix cm = clfkit::evaluate(set, data.test);
    const std::string confusion_path = (fs::path(out_dir) / "confusion.csv").string();
    const std::string metrics_path = (fs::path(out_dir) / "metrics.json").string();
    {
        std::ostringstream csv;
        clfkit::write_confusion_csv(csv, cm);
        write_text_file(confusion_path, csv.str());
    }
    const clfkit::MetricsReport rep = clfkit::report(cm);
    write_text_file(metrics_path, clfkit::report_to_json(rep).dump(2) + "\n");
    // written artifacts must parse back
    clfkit::read_confusion_csv(confusion_path).validate();
    clfkit::load_json_file(metrics_path);
    std::cout << "evaluated " << set.snapshots.size() << " snapshot(s): accuracy "
              << format_double(rep.accuracy) << "\n";
    return 0;
}

int cmd_report(const std::string& confusion_path, const std::string& avg,
               const std::string& out_path) {
    const clfkit::ConfusionMatrix cm = clfkit::read_confusion_csv(confusion_path);
    const clfkit::MetricsReport rep = clfkit::report(cm);
    const clfkit::PrfAverage* selected = nullptr;
    if (avg == "micro") {
        selected = &rep.micro;
    } else if (avg == "macro") {
        selected = &rep.macro;
    } else if (avg == "weighted") {
        selected = &rep.weighted;
    } else if (avg == "samples") {
        throw std::runtime_error(
            "samples averaging needs per-record data; a confusion matrix has none "
            "(for single-label data it equals micro)");
    } else {
        throw std::runtime_error("unknown averaging scheme: " + avg);
    }
    std::cout << avg << ": precision=" << format_double(selected->precision)
              << " recall=" << format_double(selected->recall)
              << " f1=" << format_double(selected->f1) << "\n"
              << "accuracy=" << format_double(rep.accuracy)
              << " mcc=" << format_double(rep.mcc.value) << "\n";
    if (!out_path.empty()) {
        write_text_file(out_path, clfkit::report_to_json(rep).dump(2) + "\n");
        clfkit::load_json_file(out_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"classification pipeline toolkit"};
    app.require_subcommand(1);

    // augment
    std::string aug_input, aug_out, aug_config;
    int aug_count = 1;
    std::uint64_t aug_seed = 0;
    CLI::App* augment = app.add_subcommand("augment", "write augmented copies of one image");
    augment->add_option("input", aug_input, "input .ppm/.pgm image")->required();
    augment->add_option("--out", aug_out, "output directory")->required();
    augment->add_option("--config", aug_config, "augmentation config JSON");
    augment->add_option("--count", aug_count, "number of augmented copies")
        ->check(CLI::PositiveNumber);
    augment->add_option("--seed", aug_seed, "stream seed")->required();

    // lr-trace
    std::string lr_config, lr_out;
    CLI::App* lr_trace = app.add_subcommand("lr-trace", "emit the epoch,lr,snapshot CSV");
    lr_trace->add_option("--config", lr_config, "schedule config JSON")->required();
    lr_trace->add_option("--out", lr_out, "output CSV path (default stdout)");

    // train
    std::string train_config, train_out;
    std::int64_t train_seed = -1;
    CLI::App* train = app.add_subcommand("train", "run two-phase or snapshot training");
    train->add_option("--config", train_config, "run config JSON")->required();
    train->add_option("--out", train_out, "output directory (overrides config out_dir)");
    train->add_option("--seed", train_seed, "seed override");

    // evaluate
    std::string eval_snapshots, eval_config, eval_out;
    CLI::App* evaluate = app.add_subcommand("evaluate", "ensemble a snapshot directory and score it");
    evaluate->add_option("snapshots", eval_snapshots, "directory of .bin snapshots")->required();
    evaluate->add_option("--config", eval_config, "run config JSON (supplies the dataset)")
        ->required();
    evaluate->add_option("--out", eval_out, "output directory")->required();

    // report
    std::string rep_confusion, rep_out, rep_avg = "micro";
    CLI::App* report = app.add_subcommand("report", "metrics report from a confusion CSV");
    report->add_option("confusion", rep_confusion, "confusion matrix CSV")->required();
    report->add_option("--avg", rep_avg, "averaging scheme")
        ->check(CLI::IsMember({"micro", "macro", "weighted", "samples"}));
    report->add_option("--out", rep_out, "write the full report JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (augment->parsed()) {
            return cmd_augment(aug_input, aug_out, aug_config, aug_count, aug_seed);
        }
        if (lr_trace->parsed()) {
            return cmd_lr_trace(lr_config, lr_out);
        }
        if (train->parsed()) {
            return cmd_train(train_config, train_out, train_seed);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(eval_snapshots, eval_config, eval_out);
        }
        if (report->parsed()) {
            return cmd_report(rep_confusion, rep_avg, rep_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "clfkit: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
