#include "rtwarp/tensor_io.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "rtwarp/image_io.hpp"

// Assumes a little-endian host (x86/arm64); payloads are memcpy'd.

namespace rtwarp::io {

namespace {

constexpr std::array<char, 4> kTensorMagic = {'R', 'T', 'W', '1'};
constexpr std::array<char, 4> kGridMagic = {'R', 'T', 'G', '1'};

void write_u32(std::ostream& os, uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}

uint32_t read_u32(std::istream& is) {
    uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

}  // namespace

Tensor read_tensor(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    std::array<char, 4> magic{};
    is.read(magic.data(), 4);
    if (!is || magic != kTensorMagic) throw IoError(path + ": bad tensor magic");
    if (read_u32(is) != 0) throw IoError(path + ": unsupported dtype");
    if (read_u32(is) != 4) throw IoError(path + ": expected rank 4");
    const uint32_t n = read_u32(is), c = read_u32(is);
    const uint32_t h = read_u32(is), w = read_u32(is);
    if (!is) throw IoError(path + ": truncated header");
    Tensor t(static_cast<int>(n), static_cast<int>(c), static_cast<int>(h),
             static_cast<int>(w));
    is.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.size() * sizeof(float)));
    if (!is) throw IoError(path + ": truncated payload");
    return t;
}

void write_tensor(const std::string& path, const Tensor& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os.write(kTensorMagic.data(), 4);
    write_u32(os, 0);
    write_u32(os, 4);
    write_u32(os, static_cast<uint32_t>(t.n));
    write_u32(os, static_cast<uint32_t>(t.c));
    write_u32(os, static_cast<uint32_t>(t.h));
    write_u32(os, static_cast<uint32_t>(t.w));
    os.write(reinterpret_cast<const char*>(t.data.data()),
             static_cast<std::streamsize>(t.size() * sizeof(float)));
    if (!os) throw IoError("failed writing " + path);
}

void write_grid(const std::string& path, const warp::SamplingGrid& grid,
                GridDirection direction) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os.write(kGridMagic.data(), 4);
    write_u32(os, static_cast<uint32_t>(direction));
    write_u32(os, static_cast<uint32_t>(grid.height));
    write_u32(os, static_cast<uint32_t>(grid.width));
    std::vector<float> body(grid.coords.begin(), grid.coords.end());
    os.write(reinterpret_cast<const char*>(body.data()),
             static_cast<std::streamsize>(body.size() * sizeof(float)));
    if (!os) throw IoError("failed writing " + path);
}

warp::SamplingGrid read_grid(const std::string& path, GridDirection* direction) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    std::array<char, 4> magic{};
    is.read(magic.data(), 4);
    if (!is || magic != kGridMagic) throw IoError(path + ": bad grid magic");
    const uint32_t dir = read_u32(is);
    if (dir > 3) throw IoError(path + ": bad direction code");
    if (direction) *direction = static_cast<GridDirection>(dir);
    warp::SamplingGrid g;
    g.height = static_cast<int>(read_u32(is));
    g.width = static_cast<int>(read_u32(is));
    if (!is) throw IoError(path + ": truncated header");
    std::vector<float> body(2 * static_cast<size_t>(g.height) * g.width);
    is.read(reinterpret_cast<char*>(body.data()),
            static_cast<std::streamsize>(body.size() * sizeof(float)));
    if (!is) throw IoError(path + ": truncated payload");
    g.coords.assign(body.begin(), body.end());
    const auto d = static_cast<GridDirection>(dir);
    if (d == GridDirection::Inverse || d == GridDirection::TpToTc) {
        g.border = warp::BorderPolicy::Replicate;
        g.wrap_rows = true;
    } else if (d == GridDirection::TcToTp) {
        g.border = warp::BorderPolicy::Replicate;
    }
    return g;
}

}  // namespace rtwarp::io
