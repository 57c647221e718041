#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "clfkit/model.hpp"
#include "clfkit/trainer.hpp"

namespace clfkit {

// Versioned binary snapshot file. Layout (all integers and floats
// little-endian):
//
//   magic      8 bytes  "CKSNAP01"
//   seed       u64
//   epoch      u32
//   n_layers   u32
//   per layer: in_dim u32, out_dim u32, activation u8, pad u8[3]
//   train_loss f64
//   n_params   u64
//   params     f64 * n_params   (flatten order of MlpModel)

static_assert(std::endian::native == std::endian::little,
              "snapshot files are little-endian; big-endian hosts need byte swapping");

inline constexpr char kSnapshotMagic[8] = {'C', 'K', 'S', 'N', 'A', 'P', '0', '1'};

struct SnapshotFile {
    std::uint64_t seed = 0;
    Snapshot snapshot;
    MlpModel model;  ///< shape and parameters reconstructed from the file
};

namespace detail {

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) {
        throw std::runtime_error("snapshot: truncated file");
    }
    return v;
}

}  // namespace detail

inline void save_snapshot(const std::string& path, const Snapshot& snap, const MlpModel& shape,
                          std::uint64_t seed) {
    if (snap.parameters.size() != shape.parameter_count()) {
        throw std::invalid_argument("save_snapshot: parameter count does not match model shape");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("snapshot: cannot open " + path + " for writing");
    }
    out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
    detail::write_raw(out, seed);
    detail::write_raw(out, static_cast<std::uint32_t>(snap.epoch));
    detail::write_raw(out, static_cast<std::uint32_t>(shape.layers.size()));
    for (const Layer& l : shape.layers) {
        detail::write_raw(out, static_cast<std::uint32_t>(l.in_dim));
        detail::write_raw(out, static_cast<std::uint32_t>(l.out_dim));
        detail::write_raw(out, static_cast<std::uint8_t>(l.activation));
        const std::uint8_t pad[3] = {0, 0, 0};
        out.write(reinterpret_cast<const char*>(pad), sizeof(pad));
    }
    detail::write_raw(out, snap.train_loss);
    detail::write_raw(out, static_cast<std::uint64_t>(snap.parameters.size()));
    out.write(reinterpret_cast<const char*>(snap.parameters.data()),
              static_cast<std::streamsize>(snap.parameters.size() * sizeof(double)));
    if (!out) {
        throw std::runtime_error("snapshot: failed writing " + path);
    }
}

inline SnapshotFile load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("snapshot: cannot open " + path);
    }
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0) {
        throw std::runtime_error("snapshot: bad magic in " + path);
    }
    SnapshotFile f;
    f.seed = detail::read_raw<std::uint64_t>(in);
    f.snapshot.epoch = static_cast<int>(detail::read_raw<std::uint32_t>(in));
    const std::uint32_t n_layers = detail::read_raw<std::uint32_t>(in);
    if (n_layers == 0 || n_layers > 64) {
        throw std::runtime_error("snapshot: implausible layer count in " + path);
    }
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        Layer l;
        l.in_dim = static_cast<int>(detail::read_raw<std::uint32_t>(in));
        l.out_dim = static_cast<int>(detail::read_raw<std::uint32_t>(in));
        const std::uint8_t act = detail::read_raw<std::uint8_t>(in);
        if (act > 1) {
            throw std::runtime_error("snapshot: unknown activation tag in " + path);
        }
        l.activation = static_cast<Activation>(act);
        std::uint8_t pad[3];
        in.read(reinterpret_cast<char*>(pad), sizeof(pad));
        l.weights.assign(static_cast<std::size_t>(l.in_dim) * l.out_dim, 0.0);
        l.bias.assign(l.out_dim, 0.0);
        f.model.layers.push_back(std::move(l));
    }
    f.snapshot.train_loss = detail::read_raw<double>(in);
    const std::uint64_t n_params = detail::read_raw<std::uint64_t>(in);
    if (n_params != f.model.parameter_count()) {
        throw std::runtime_error("snapshot: parameter count does not match shape in " + path);
    }
    f.snapshot.parameters.resize(n_params);
    in.read(reinterpret_cast<char*>(f.snapshot.parameters.data()),
            static_cast<std::streamsize>(n_params * sizeof(double)));
    if (!in) {
        throw std::runtime_error("snapshot: truncated parameter block in " + path);
    }
    f.model.load_parameters(f.snapshot.parameters);
    f.model.validate();
    return f;
}

}  // namespace clfkit
