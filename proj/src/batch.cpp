#include "trackpp/batch.hpp"

#include <algorithm>
#include <exception>
#include <limits>

#include <omp.h>

#include "trackpp/error.hpp"

namespace trackpp::batch {

namespace {

// Runs body(i) for i in [0, n). Exceptions cannot cross an OpenMP region, so
// the first one is captured and rethrown after the loop.
template <typename Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::exception_ptr error;
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(trackpp_batch_error)
            if (!error) {
                error = std::current_exception();
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace

std::vector<eval::SequenceMetrics> evaluate(std::span<const SequenceInput> inputs, Execution exec) {
    std::vector<eval::SequenceMetrics> out(inputs.size());
    for_each_index(inputs.size(), exec, [&](std::size_t i) {
        const SequenceInput& in = inputs[i];
        try {
            out[i] = eval::evaluate_sequence(in.name, in.traj, in.gt);
        } catch (const Error& e) {
            throw Error(in.name + ": " + e.what(), e.kind());
        }
    });
    return out;
}

std::vector<sim::SyntheticSequence> simulate(std::span<const sim::SceneConfig> scenes, Execution exec) {
    std::vector<sim::SyntheticSequence> out(scenes.size());
    for_each_index(scenes.size(), exec, [&](std::size_t i) { out[i] = sim::generate(scenes[i]); });
    return out;
}

ScenarioOutcome run_scenario(const sim::SceneConfig& scene, const mbpp::MbppConfig& config,
                             const kalman::FilterConfig& filter) {
    const sim::SyntheticSequence seq = sim::generate(scene);
    const Box init = seq.ground_truth.front();

    const mbpp::SequenceRun mb = mbpp::run_sequence(seq.stream, init, config, filter);
    std::vector<Box> db;
    db.reserve(seq.ground_truth.size());
    db.push_back(init);
    for (const Box& b : mbpp::dbpp_baseline(seq.stream)) {
        db.push_back(b);
    }

    ScenarioOutcome out;
    out.seed = scene.seed;
    out.mbpp = eval::evaluate_sequence(scene.name, mb.trajectory, seq.ground_truth);
    out.dbpp = eval::evaluate_sequence(scene.name, db, seq.ground_truth);
    out.drift_frames = static_cast<int>(
        std::count_if(mb.diagnostics.begin(), mb.diagnostics.end(),
                      [](const mbpp::StepDiagnostics& d) { return d.drift_detected; }));
    out.identical = mb.trajectory == db;

    for (std::size_t f = 0; f < seq.ground_truth.size(); ++f) {
        if (!scene.in_swap(static_cast<int>(f))) {
            continue;
        }
        out.has_swap = true;
        out.mbpp_min_swap_overlap = std::min(out.mbpp_min_swap_overlap, iou(mb.trajectory[f], seq.ground_truth[f]));
        out.dbpp_min_swap_overlap = std::min(out.dbpp_min_swap_overlap, iou(db[f], seq.ground_truth[f]));
    }
    return out;
}

std::vector<ScenarioOutcome> run_scenarios(std::span<const sim::SceneConfig> scenes,
                                           const mbpp::MbppConfig& config,
                                           const kalman::FilterConfig& filter, Execution exec) {
    std::vector<ScenarioOutcome> out(scenes.size());
    for_each_index(scenes.size(), exec, [&](std::size_t i) { out[i] = run_scenario(scenes[i], config, filter); });
    return out;
}

AugmentationCounts count_augmentations(const pairgen::AugmentationConfig& config, std::uint64_t first_seed,
                                       std::uint64_t draws, Execution exec) {
    config.validate();
    AugmentationCounts out;
    out.draws = draws;
    if (draws == 0) {
        return out;
    }

    std::uint64_t fired[5] = {0, 0, 0, 0, 0};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::int64_t>(draws);

    if (exec == Execution::serial) {
        for (std::int64_t k = 0; k < n; ++k) {
            const pairgen::AugmentationPlan plan = pairgen::draw_plan(config, first_seed + static_cast<std::uint64_t>(k));
            for (std::size_t op = 0; op < 5; ++op) {
                fired[op] += plan.fire[op] ? 1 : 0;
            }
            lo = std::min(lo, plan.angle_deg);
            hi = std::max(hi, plan.angle_deg);
        }
    } else {
#pragma omp parallel for reduction(+ : fired[:5]) reduction(min : lo) reduction(max : hi) schedule(static)
        for (std::int64_t k = 0; k < n; ++k) {
            const pairgen::AugmentationPlan plan = pairgen::draw_plan(config, first_seed + static_cast<std::uint64_t>(k));
            for (std::size_t op = 0; op < 5; ++op) {
                fired[op] += plan.fire[op] ? 1 : 0;
            }
            lo = std::min(lo, plan.angle_deg);
            hi = std::max(hi, plan.angle_deg);
        }
    }
    std::copy(std::begin(fired), std::end(fired), out.fired.begin());
    out.min_angle = lo;
    out.max_angle = hi;
    return out;
}

ImageCache load_images(std::span<const pairgen::ManifestEntry> manifest) {
    ImageCache cache;
    for (const pairgen::ManifestEntry& e : manifest) {
        if (!cache.contains(e.image)) {
            cache.emplace(e.image, pairgen::load_image(e.image));
        }
    }
    return cache;
}

std::vector<pairgen::SamplePair> generate_pairs(std::span<const pairgen::ManifestEntry> manifest,
                                                const ImageCache& images, const pairgen::CropSettings& crop,
                                                const pairgen::AugmentationConfig& aug, Execution exec) {
    aug.validate();
    std::vector<pairgen::SamplePair> out(manifest.size());
    for_each_index(manifest.size(), exec, [&](std::size_t i) {
        const pairgen::ManifestEntry& e = manifest[i];
        const auto it = images.find(e.image);
        if (it == images.end()) {
            throw Error("image not loaded: " + e.image.string());
        }
        out[i] = pairgen::make_pair(it->second, e.box, e.seed, crop, aug);
    });
    return out;
}

}  // namespace trackpp::batch
