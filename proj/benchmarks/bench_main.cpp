#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "rtwarp/nn.hpp"
#include "rtwarp/warp.hpp"

using namespace rtwarp;

namespace {

Tensor random_tensor(int n, int c, int h, int w, uint64_t seed) {
    Tensor t(n, c, h, w);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> d(0.0f, 1.0f);
    for (float& v : t.data) v = d(rng);
    return t;
}

void BM_MakeForwardGrid(benchmark::State& state) {
    const geometry::BBox bbox{130, 140, 250, 230};
    for (auto _ : state) {
        benchmark::DoNotOptimize(warp::make_forward_grid(bbox, 512, 512));
    }
}
BENCHMARK(BM_MakeForwardGrid)->Unit(benchmark::kMillisecond);

void BM_WarpImage512(benchmark::State& state) {
    const geometry::BBox bbox{130, 140, 250, 230};
    const Tensor img = random_tensor(1, 3, 512, 512, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(warp::warp_image(img, bbox, 512, 512));
    }
}
BENCHMARK(BM_WarpImage512)->Unit(benchmark::kMillisecond);

void BM_UnwarpScores(benchmark::State& state) {
    const geometry::BBox bbox{130, 140, 250, 230};
    const int c = static_cast<int>(state.range(0));
    const Tensor scores = random_tensor(1, c, 512, 512, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(warp::unwarp_scores(scores, bbox, 512, 512));
    }
}
BENCHMARK(BM_UnwarpScores)->Arg(1)->Arg(11)->Unit(benchmark::kMillisecond);

void BM_Conv3x3Mixed(benchmark::State& state) {
    const int c = static_cast<int>(state.range(0));
    const Tensor x = random_tensor(1, c, 64, 64, 3);
    nn::ConvParams p;
    p.weights = random_tensor(c, c, 3, 3, 4);
    p.bias.assign(c, 0.1f);
    p.pad_mode = nn::PadMode::Mixed;
    for (auto _ : state) {
        benchmark::DoNotOptimize(nn::conv2d(x, p));
    }
}
BENCHMARK(BM_Conv3x3Mixed)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ResampleTpToTc(benchmark::State& state) {
    const Tensor x = random_tensor(1, 8, 128, 128, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(nn::resample_tp_to_tc(x));
    }
}
BENCHMARK(BM_ResampleTpToTc)->Unit(benchmark::kMillisecond);

void BM_HybridBlock(benchmark::State& state) {
    const int c = static_cast<int>(state.range(0));
    const Tensor x = random_tensor(1, c, 64, 64, 6);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<float> d(-0.1f, 0.1f);
    auto conv = [&](int oc, int ic, int k) {
        nn::ConvParams p;
        p.weights = Tensor(oc, ic, k, k);
        for (float& v : p.weights.data) v = d(rng);
        p.bias.resize(oc);
        for (float& b : p.bias) b = d(rng);
        return p;
    };
    nn::HybridBlockParams p;
    p.reduce = conv(c / 4, c, 1);
    p.tp_branch = conv(c / 8, c / 8, 3);
    p.tc_branch = conv(c / 8, c / 8, 3);
    p.restore = conv(c, c / 4, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(nn::hybrid_block_forward(x, p));
    }
}
BENCHMARK(BM_HybridBlock)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
