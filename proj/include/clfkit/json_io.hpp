#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "clfkit/augment.hpp"
#include "clfkit/metrics.hpp"
#include "clfkit/optim.hpp"
#include "clfkit/trainer.hpp"

namespace clfkit {

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return j;
}

// --- AugmentConfig --------------------------------------------------------

inline json to_json(const AugmentConfig& cfg) {
    return json{{"rotation_deg", cfg.rotation_deg},
                {"width_shift_frac", cfg.width_shift_frac},
                {"height_shift_frac", cfg.height_shift_frac},
                {"shear_intensity", cfg.shear_intensity},
                {"zoom_range", {cfg.zoom_range.lo, cfg.zoom_range.hi}},
                {"hflip_enabled", cfg.hflip_enabled},
                {"vflip_enabled", cfg.vflip_enabled},
                {"fill_policy", "nearest"}};
}

/// Missing fields keep their defaults, so {} is the default policy.
inline AugmentConfig augment_config_from_json(const json& j) {
    AugmentConfig cfg;
    cfg.rotation_deg = j.value("rotation_deg", cfg.rotation_deg);
    cfg.width_shift_frac = j.value("width_shift_frac", cfg.width_shift_frac);
    cfg.height_shift_frac = j.value("height_shift_frac", cfg.height_shift_frac);
    cfg.shear_intensity = j.value("shear_intensity", cfg.shear_intensity);
    if (j.contains("zoom_range")) {
        const json& z = j.at("zoom_range");
        if (!z.is_array() || z.size() != 2) {
            throw std::runtime_error("augment config: zoom_range must be [lo, hi]");
        }
        cfg.zoom_range.lo = z[0].get<double>();
        cfg.zoom_range.hi = z[1].get<double>();
    }
    cfg.hflip_enabled = j.value("hflip_enabled", cfg.hflip_enabled);
    cfg.vflip_enabled = j.value("vflip_enabled", cfg.vflip_enabled);
    if (j.contains("fill_policy") && j.at("fill_policy").get<std::string>() != "nearest") {
        throw std::runtime_error("augment config: only the 'nearest' fill policy exists");
    }
    cfg.validate();
    return cfg;
}

// --- ScheduleConfig -------------------------------------------------------

inline json to_json(const ScheduleConfig& cfg) {
    return json{{"alpha0", cfg.alpha0},
                {"total_epochs", cfg.total_epochs},
                {"num_snapshots", cfg.num_snapshots}};
}

inline ScheduleConfig schedule_config_from_json(const json& j) {
    ScheduleConfig cfg;
    try {
        cfg.alpha0 = j.at("alpha0").get<double>();
        cfg.total_epochs = j.at("total_epochs").get<int>();
        cfg.num_snapshots = j.at("num_snapshots").get<int>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("schedule config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

// --- RunConfig (cli) ------------------------------------------------------

struct DatasetConfig {
    std::string type = "synthetic";  // "synthetic" or "directory"
    // synthetic
    int classes = 4;
    int per_class = 250;
    int image_size = 16;
    // directory
    std::string train_path;
    std::string test_path;
};

/// Everything one training run needs, recorded in a single JSON document so
/// the run is reproducible from its manifest.
struct RunConfig {
    std::uint64_t seed = 0;
    std::string out_dir;
    DatasetConfig dataset;
    AugmentConfig augment;
    std::string mode = "snapshot";  // "snapshot" or "two_phase"
    TrainConfig train;
    int hidden_width = 64;
    ScheduleConfig schedule;
};

inline json to_json(const RunConfig& cfg) {
    json dataset{{"type", cfg.dataset.type}};
    if (cfg.dataset.type == "synthetic") {
        dataset["classes"] = cfg.dataset.classes;
        dataset["per_class"] = cfg.dataset.per_class;
        dataset["image_size"] = cfg.dataset.image_size;
    } else {
        dataset["train_path"] = cfg.dataset.train_path;
        dataset["test_path"] = cfg.dataset.test_path;
        dataset["image_size"] = cfg.dataset.image_size;
    }
    json train{{"mode", cfg.mode},
               {"batch_size", cfg.train.batch_size},
               {"hidden_width", cfg.hidden_width},
               {"momentum", cfg.train.momentum}};
    if (cfg.mode == "two_phase") {
        train["phase1_epochs"] = cfg.train.phase1_epochs;
        train["adam_lr"] = cfg.train.adam_lr;
        train["phase2_epochs"] = cfg.train.phase2_epochs;
        train["phase2_lr"] = cfg.train.phase2_lr;
    } else {
        train["schedule"] = to_json(cfg.schedule);
    }
    return json{{"seed", cfg.seed},
                {"out_dir", cfg.out_dir},
                {"dataset", dataset},
                {"augment", to_json(cfg.augment)},
                {"train", train}};
}

inline RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    if (!j.contains("seed")) {
        throw std::runtime_error("run config: seed is mandatory");
    }
    try {
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.out_dir = j.value("out_dir", std::string{});
        if (j.contains("dataset")) {
            const json& d = j.at("dataset");
            cfg.dataset.type = d.value("type", cfg.dataset.type);
            if (cfg.dataset.type == "synthetic") {
                cfg.dataset.classes = d.value("classes", cfg.dataset.classes);
                cfg.dataset.per_class = d.value("per_class", cfg.dataset.per_class);
            } else if (cfg.dataset.type == "directory") {
                cfg.dataset.train_path = d.at("train_path").get<std::string>();
                cfg.dataset.test_path = d.at("test_path").get<std::string>();
            } else {
                throw std::runtime_error("run config: dataset.type must be synthetic or directory");
            }
            cfg.dataset.image_size = d.value("image_size", cfg.dataset.image_size);
        }
        if (j.contains("augment")) {
            cfg.augment = augment_config_from_json(j.at("augment"));
        }
        if (j.contains("train")) {
            const json& t = j.at("train");
            cfg.mode = t.value("mode", cfg.mode);
            if (cfg.mode != "snapshot" && cfg.mode != "two_phase") {
                throw std::runtime_error("run config: train.mode must be snapshot or two_phase");
            }
            cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
            cfg.hidden_width = t.value("hidden_width", cfg.hidden_width);
            cfg.train.momentum = t.value("momentum", cfg.train.momentum);
            cfg.train.phase1_epochs = t.value("phase1_epochs", cfg.train.phase1_epochs);
            cfg.train.adam_lr = t.value("adam_lr", cfg.train.adam_lr);
            cfg.train.phase2_epochs = t.value("phase2_epochs", cfg.train.phase2_epochs);
            cfg.train.phase2_lr = t.value("phase2_lr", cfg.train.phase2_lr);
            if (t.contains("schedule")) {
                cfg.schedule = schedule_config_from_json(t.at("schedule"));
            } else if (cfg.mode == "snapshot") {
                throw std::runtime_error("run config: snapshot mode needs train.schedule");
            }
        } else {
            throw std::runtime_error("run config: train section is mandatory");
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("run config: ") + e.what());
    }
    cfg.train.seed = cfg.seed;
    cfg.train.validate();
    if (cfg.hidden_width < 1) {
        throw std::runtime_error("run config: hidden_width must be >= 1");
    }
    return cfg;
}

// --- MetricsReport --------------------------------------------------------

namespace detail {
inline json prf_to_json(const PrfAverage& a) {
    return json{{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}};
}
}  // namespace detail

inline json report_to_json(const MetricsReport& rep) {
    json per_label = json::object();
    for (std::size_t i = 0; i < rep.labels.size(); ++i) {
        const PerLabelMetrics& m = rep.per_label[i];
        per_label[rep.labels[i]] = json{{"precision", m.precision},
                                        {"recall", m.recall},
                                        {"f1", m.f1},
                                        {"support", m.support}};
    }
    json j{{"per_label", per_label},
           {"micro", detail::prf_to_json(rep.micro)},
           {"macro", detail::prf_to_json(rep.macro)},
           {"weighted", detail::prf_to_json(rep.weighted)},
           {"accuracy", rep.accuracy},
           {"mcc", rep.mcc.value}};
    if (rep.samples.has_value()) {
        j["samples"] = detail::prf_to_json(*rep.samples);
    }
    if (!rep.mcc.defined) {
        j["mcc_undefined"] = true;
    }
    return j;
}

}  // namespace clfkit
