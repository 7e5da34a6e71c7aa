#pragma once

#include <string>

#include "rtwarp/tensor.hpp"
#include "rtwarp/warp.hpp"

// Raw binary formats, all little-endian.
//
// Tensor / weight file:
//   bytes 0..3   magic "RTW1"
//   bytes 4..7   u32 dtype code (0 = float32)
//   bytes 8..11  u32 rank (always 4 here)
//   then rank*4  u32 dims, outermost first (n, c, h, w)
//   then         float32 payload, row-major
//
// Sampling-grid file:
//   bytes 0..3   magic "RTG1"
//   bytes 4..7   u32 direction code (0 forward, 1 inverse, 2 tp2tc, 3 tc2tp)
//   bytes 8..11  u32 H
//   bytes 12..15 u32 W
//   then         H*W interleaved (sx, sy) float32 pairs, row-major

namespace rtwarp::io {

enum class GridDirection : uint32_t {
    Forward = 0,
    Inverse = 1,
    TpToTc = 2,
    TcToTp = 3,
};

Tensor read_tensor(const std::string& path);
void write_tensor(const std::string& path, const Tensor& t);

void write_grid(const std::string& path, const warp::SamplingGrid& grid,
                GridDirection direction);
warp::SamplingGrid read_grid(const std::string& path,
                             GridDirection* direction = nullptr);

}  // namespace rtwarp::io
