// Serial reference vs OpenMP kernels, plus single-step MBPP latency.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "trackpp/batch.hpp"
#include "trackpp/mbpp.hpp"

using namespace trackpp;

namespace {

batch::Execution mode(const benchmark::State& state) {
    return state.range(0) == 0 ? batch::Execution::serial : batch::Execution::parallel;
}

std::vector<batch::SequenceInput> sequences() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> pos(0, 600), side(10, 80);
    std::vector<batch::SequenceInput> in;
    for (int s = 0; s < 100; ++s) {
        batch::SequenceInput q{"seq" + std::to_string(s), {}, {}};
        for (int f = 0; f < 1000; ++f) {
            q.gt.push_back({pos(rng), pos(rng), side(rng), side(rng)});
            q.traj.push_back({q.gt.back().x + pos(rng) / 40, q.gt.back().y, side(rng), side(rng)});
        }
        in.push_back(std::move(q));
    }
    return in;
}

void BM_Evaluate(benchmark::State& state) {
    const auto in = sequences();
    for (auto _ : state) {
        benchmark::DoNotOptimize(batch::evaluate(in, mode(state)));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.size()));
}
BENCHMARK(BM_Evaluate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Scenarios(benchmark::State& state) {
    std::vector<sim::SceneConfig> scenes(16);
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        scenes[i].seed = i;
    }
    const auto filter = kalman::FilterConfig::defaults();
    for (auto _ : state) {
        benchmark::DoNotOptimize(batch::run_scenarios(scenes, {}, filter, mode(state)));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scenes.size()));
}
BENCHMARK(BM_Scenarios)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_AugmentationCounts(benchmark::State& state) {
    const pairgen::AugmentationConfig c;
    for (auto _ : state) {
        benchmark::DoNotOptimize(batch::count_augmentations(c, 1, 100000, mode(state)));
    }
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_AugmentationCounts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_MbppStep(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(0, 1000), score(0.05, 0.6);
    std::vector<mbpp::FrameObservation> frames;
    for (int f = 1; f <= 1000; ++f) {
        const Box target{100 + 0.1 * f, 200, 60, 40};
        std::vector<ScoredBox> c{{target, 0.9}};
        if (state.range(0) == 1) {
            c.insert(c.begin(), ScoredBox{{target.x + 90, target.y, 60, 40}, 0.95});
        }
        while (c.size() < 40) {
            c.push_back({{pos(rng), pos(rng), 60, 40}, score(rng)});
        }
        frames.push_back({f, c.front(), c});
    }
    mbpp::TrackerSession session = mbpp::TrackerSession::start({100, 200, 60, 40});
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(session.step(frames[i]));
        if (++i == frames.size()) {
            state.PauseTiming();
            session = mbpp::TrackerSession::start({100, 200, 60, 40});
            i = 0;
            state.ResumeTiming();
        }
    }
}
// Arg 0: max box accepted every frame. Arg 1: a distractor holds the max so every frame relocates.
BENCHMARK(BM_MbppStep)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
