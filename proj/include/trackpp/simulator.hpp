#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trackpp/box.hpp"
#include "trackpp/mbpp.hpp"
#include "trackpp/stream_io.hpp"

namespace trackpp::sim {

struct Event {
    int start = 0;
    int duration = 0;

    bool contains(int frame) const { return frame >= start && frame < start + duration; }
    friend bool operator==(const Event&, const Event&) = default;
};

/// Synthetic scene: one designated target plus look-alike distractors and
/// low-score clutter. Scores are modeled directly; no pixels are rendered.
struct SceneConfig {
    std::string name = "synthetic";
    double arena_width = 640.0;
    double arena_height = 480.0;
    int num_frames = 200;
    int num_distractors = 3;

    double speed_mean = 2.0;          ///< px/frame, each agent keeps its drawn speed
    double speed_std = 0.5;
    double velocity_noise_std = 0.2;  ///< per-frame velocity perturbation, px/frame; turns the heading
    /// Agents whose center comes within wall_margin of a wall accelerate away
    /// from it at wall_turn_accel, so they turn instead of bouncing. Hard
    /// reflection still applies at the wall itself. 0 disables the turn.
    double wall_margin = 40.0;       ///< px
    double wall_turn_accel = 0.25;   ///< px/frame^2
    double target_width = 40.0;
    double target_height = 40.0;
    double size_jitter_std = 1.0;     ///< px, independent per frame

    double target_score_mean = 0.85;
    double target_score_std = 0.05;
    double distractor_score_mean = 0.75;
    double distractor_score_std = 0.05;
    double swap_score_mean = 0.95;    ///< distractor mean while a swap event is active
    double clutter_score_mean = 0.1;
    double clutter_score_std = 0.05;
    int num_clutter = 40;

    int num_candidates = 40;
    double nms_threshold = 0.5;

    std::vector<Event> swap_events = {{60, 20}, {130, 20}};
    std::vector<Event> occlusion_events;
    std::uint64_t seed = 0;

    /// Throws Error naming the first violated constraint.
    void validate() const;

    bool in_swap(int frame) const;
    bool in_occlusion(int frame) const;
};

struct SyntheticSequence {
    SceneConfig config;
    std::vector<Box> ground_truth;               ///< frames 0..num_frames-1
    std::vector<std::vector<Box>> identities;    ///< per frame, agent 0 is the target
    std::vector<int> swap_agents;                ///< distractor (agent index) boosted by each swap event
    std::vector<mbpp::FrameObservation> stream;  ///< frames 1..num_frames-1

    io::CandidateStream candidate_stream() const;
};

SyntheticSequence generate(const SceneConfig& config);

}  // namespace trackpp::sim
