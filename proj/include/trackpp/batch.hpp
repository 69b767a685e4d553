#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "trackpp/eval.hpp"
#include "trackpp/kalman.hpp"
#include "trackpp/mbpp.hpp"
#include "trackpp/pairgen.hpp"
#include "trackpp/simulator.hpp"

// Data-parallel drivers over independent work items (sequences, scenarios,
// seeds, manifest entries). Every kernel has a serial path that is the
// reference for the OpenMP path; both must produce identical results.
namespace trackpp::batch {

enum class Execution { serial, parallel };

struct SequenceInput {
    std::string name;
    std::vector<Box> traj;
    std::vector<Box> gt;
};

std::vector<eval::SequenceMetrics> evaluate(std::span<const SequenceInput> inputs, Execution exec);

std::vector<sim::SyntheticSequence> simulate(std::span<const sim::SceneConfig> scenes, Execution exec);

struct ScenarioOutcome {
    std::uint64_t seed = 0;
    eval::SequenceMetrics mbpp;
    eval::SequenceMetrics dbpp;
    int drift_frames = 0;                ///< frames where MBPP detected drift
    bool identical = false;              ///< MBPP and DBPP trajectories are bit-identical
    bool has_swap = false;
    double mbpp_min_swap_overlap = 1.0;  ///< min IoU with ground truth over swap-event frames
    double dbpp_min_swap_overlap = 1.0;

    friend bool operator==(const ScenarioOutcome&, const ScenarioOutcome&) = default;
};

/// Simulate each scene, run MBPP and the DBPP baseline, and score both.
/// Both trajectories start with the ground-truth init box.
ScenarioOutcome run_scenario(const sim::SceneConfig& scene, const mbpp::MbppConfig& config,
                             const kalman::FilterConfig& filter);
std::vector<ScenarioOutcome> run_scenarios(std::span<const sim::SceneConfig> scenes,
                                           const mbpp::MbppConfig& config,
                                           const kalman::FilterConfig& filter, Execution exec);

struct AugmentationCounts {
    std::uint64_t draws = 0;
    std::array<std::uint64_t, 5> fired{};  ///< indexed like pairgen::kAugOrder
    double min_angle = 0.0;
    double max_angle = 0.0;

    double frequency(pairgen::AugOp op) const {
        return draws == 0 ? 0.0
                          : static_cast<double>(fired[static_cast<std::size_t>(op)]) / static_cast<double>(draws);
    }
    friend bool operator==(const AugmentationCounts&, const AugmentationCounts&) = default;
};

/// Tallies augmentation plans for seeds first_seed .. first_seed + draws - 1.
AugmentationCounts count_augmentations(const pairgen::AugmentationConfig& config, std::uint64_t first_seed,
                                       std::uint64_t draws, Execution exec);

using ImageCache = std::map<std::filesystem::path, cv::Mat>;

/// Loads every image referenced by the manifest once.
ImageCache load_images(std::span<const pairgen::ManifestEntry> manifest);

std::vector<pairgen::SamplePair> generate_pairs(std::span<const pairgen::ManifestEntry> manifest,
                                                const ImageCache& images, const pairgen::CropSettings& crop,
                                                const pairgen::AugmentationConfig& aug, Execution exec);

}  // namespace trackpp::batch
