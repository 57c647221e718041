#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "clfkit/image.hpp"

namespace clfkit {

// Binary PPM (P6) / PGM (P5) with maxval 255. These are the toolkit's
// bit-exact interchange formats: write(read(f)) reproduces f byte for byte
// when f was written by this module.

namespace detail {

inline int pnm_read_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c = in.get();
    // skip whitespace and '#' comments
    while (c != EOF && (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#')) {
        if (c == '#') {
            while (c != EOF && c != '\n') {
                c = in.get();
            }
        }
        c = in.get();
    }
    while (c != EOF && c != ' ' && c != '\t' && c != '\r' && c != '\n' && c != '#') {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return c;  // the delimiter consumed after the token
}

inline int pnm_parse_int(const std::string& tok, const char* what) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
        throw std::runtime_error(std::string("pnm: malformed ") + what);
    }
    return std::stoi(tok);
}

}  // namespace detail

inline ImageBuffer read_pnm(std::istream& in) {
    std::string tok;
    detail::pnm_read_token(in, tok);
    int channels = 0;
    if (tok == "P6") {
        channels = 3;
    } else if (tok == "P5") {
        channels = 1;
    } else {
        throw std::runtime_error("pnm: expected P5 or P6 magic");
    }
    detail::pnm_read_token(in, tok);
    const int width = detail::pnm_parse_int(tok, "width");
    detail::pnm_read_token(in, tok);
    const int height = detail::pnm_parse_int(tok, "height");
    detail::pnm_read_token(in, tok);
    const int maxval = detail::pnm_parse_int(tok, "maxval");
    if (maxval != 255) {
        throw std::runtime_error("pnm: only maxval 255 is supported");
    }
    if (width < 1 || height < 1) {
        throw std::runtime_error("pnm: dimensions must be positive");
    }
    // Exactly one whitespace byte separates the header from the raster and
    // pnm_read_token has already consumed it.
    ImageBuffer img;
    img.height = height;
    img.width = width;
    img.channels = channels;
    img.domain = ValueDomain::U8;
    const std::size_t n = static_cast<std::size_t>(height) * width * channels;
    img.data.resize(n);
    std::string raw(n, '\0');
    in.read(raw.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw std::runtime_error("pnm: truncated raster data");
    }
    for (std::size_t i = 0; i < n; ++i) {
        img.data[i] = static_cast<double>(static_cast<std::uint8_t>(raw[i]));
    }
    return img;
}

inline ImageBuffer read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("pnm: cannot open " + path);
    }
    return read_pnm(in);
}

inline void write_pnm(std::ostream& out, const ImageBuffer& img) {
    if (img.domain != ValueDomain::U8) {
        throw std::invalid_argument("pnm: only 8-bit images can be written; denormalize first");
    }
    img.validate();
    out << (img.channels == 3 ? "P6" : "P5") << "\n"
        << img.width << " " << img.height << "\n255\n";
    std::string raw;
    raw.reserve(img.data.size());
    for (const double v : img.data) {
        raw.push_back(static_cast<char>(static_cast<std::uint8_t>(v)));
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

inline void write_pnm(const std::string& path, const ImageBuffer& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("pnm: cannot open " + path + " for writing");
    }
    write_pnm(out, img);
    if (!out) {
        throw std::runtime_error("pnm: failed writing " + path);
    }
}

}  // namespace clfkit
