#pragma once

// Portable FloatMap I/O. Header: "PF", "<width> <height>", "<scale>" where a
// negative scale marks little-endian payload; rows are stored bottom-to-top.
// Round-trips are bit-exact for every finite float value.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "bracketforge/core.hpp"

namespace bracketforge {

namespace detail {
inline std::string next_pfm_token(std::istream& in) {
    std::string tok;
    in >> tok;
    if (!in) throw std::runtime_error("pfm: malformed header (unexpected EOF)");
    return tok;
}
}  // namespace detail

inline void write_pfm(const Frame& frame, const std::filesystem::path& path) {
    if (!frame.all_finite())
        throw std::invalid_argument("write_pfm: non-finite values");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pfm: cannot open " + path.string());
    out << "PF\n" << frame.width << " " << frame.height << "\n-1.0\n";
    // Bottom-to-top row order.
    for (int y = frame.height - 1; y >= 0; --y) {
        const float* row = frame.data.data() + static_cast<std::size_t>(y) * frame.width * 3;
        out.write(reinterpret_cast<const char*>(row),
                  static_cast<std::streamsize>(frame.width) * 3 * sizeof(float));
    }
    if (!out) throw std::runtime_error("write_pfm: write failed for " + path.string());
}

inline Frame read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pfm: cannot open " + path.string());

    const std::string magic = detail::next_pfm_token(in);
    if (magic == "Pf")
        throw std::runtime_error("read_pfm: grayscale PFM not supported: " + path.string());
    if (magic != "PF")
        throw std::runtime_error("read_pfm: bad magic '" + magic + "' in " + path.string());

    int width = 0, height = 0;
    double scale = 0.0;
    try {
        width = std::stoi(detail::next_pfm_token(in));
        height = std::stoi(detail::next_pfm_token(in));
        scale = std::stod(detail::next_pfm_token(in));
    } catch (const std::exception&) {
        throw std::runtime_error("read_pfm: malformed header in " + path.string());
    }
    if (width <= 0 || height <= 0 || scale == 0.0)
        throw std::runtime_error("read_pfm: malformed header in " + path.string());
    in.get();  // single whitespace separating header from payload

    Frame frame(width, height);
    const std::size_t row_bytes = static_cast<std::size_t>(width) * 3 * sizeof(float);
    for (int y = height - 1; y >= 0; --y) {
        float* row = frame.data.data() + static_cast<std::size_t>(y) * width * 3;
        in.read(reinterpret_cast<char*>(row), static_cast<std::streamsize>(row_bytes));
        if (static_cast<std::size_t>(in.gcount()) != row_bytes)
            throw std::runtime_error("read_pfm: truncated payload in " + path.string());
    }
    if (in.peek() != std::ifstream::traits_type::eof())
        throw std::runtime_error("read_pfm: payload larger than header claims in " + path.string());

    const bool file_little_endian = scale < 0.0;
    if (file_little_endian != (std::endian::native == std::endian::little)) {
        for (float& v : frame.data) {
            std::uint32_t u;
            std::memcpy(&u, &v, 4);
            u = ((u & 0x000000FFu) << 24) | ((u & 0x0000FF00u) << 8) |
                ((u & 0x00FF0000u) >> 8) | ((u & 0xFF000000u) >> 24);
            std::memcpy(&v, &u, 4);
        }
    }
    return frame;
}

}  // namespace bracketforge
