#pragma once

#include <span>
#include <vector>

#include "trackpp/box.hpp"
#include "trackpp/kalman.hpp"

namespace trackpp::mbpp {

inline constexpr double kDefaultConf = 0.6;

/// Which box feeds the Kalman measurement update after each frame.
enum class UpdatePolicy {
    always,         ///< update with the emitted box every frame
    accepted_only,  ///< update only when the max-response box was accepted; coast otherwise
};

/// What to emit when drift is detected but no candidate overlaps the estimation box.
enum class Fallback { max_response, estimation_box };

struct MbppConfig {
    double conf = kDefaultConf;
    UpdatePolicy update_policy = UpdatePolicy::always;
    Fallback fallback = Fallback::max_response;

    void validate() const;
};

/// One frame of tracker output. candidates.front() must equal max.
struct FrameObservation {
    int frame = 0;
    ScoredBox max;
    std::vector<ScoredBox> candidates;

    friend bool operator==(const FrameObservation&, const FrameObservation&) = default;
};

enum class Source { max_response, candidate, fallback_max_response, fallback_estimation };

struct StepDiagnostics {
    Box estimation;
    double max_iou = 0.0;         ///< IoU(max box, estimation box)
    bool drift_detected = false;
    int chosen_index = 0;         ///< index into candidates; -1 for the estimation-box fallback
    Source source = Source::max_response;
    std::vector<double> scores;   ///< location scores, filled only when drift was detected
    bool kf_clamped = false;
    bool kf_updated = false;
};

struct StepResult {
    Box box;
    StepDiagnostics diagnostics;
};

/// score * IoU(candidate, estimation).
double location_score(const ScoredBox& candidate, const Box& estimation);

/// Single-target MBPP state. Step calls on one session must be serialized.
class TrackerSession {
public:
    static TrackerSession start(const Box& init_box, const MbppConfig& config = {},
                                const kalman::FilterConfig& filter = kalman::FilterConfig::defaults());

    StepResult step(const FrameObservation& obs);

    const kalman::TrackState& kf() const { return kf_; }
    const Box& last_output() const { return last_output_; }
    int frame_count() const { return frame_count_; }
    const MbppConfig& config() const { return config_; }

private:
    TrackerSession(const Box& init_box, const MbppConfig& config, const kalman::FilterConfig& filter);

    kalman::TrackState kf_;
    MbppConfig config_;
    kalman::FilterConfig filter_;
    Box last_output_;
    int frame_count_ = 0;
};

struct SequenceRun {
    std::vector<Box> trajectory;            ///< init box followed by one box per observation
    std::vector<StepDiagnostics> diagnostics;
};

/// Runs MBPP over frames 1..N. Observation i must carry frame index i + 1.
SequenceRun run_sequence(std::span<const FrameObservation> stream, const Box& init_box,
                         const MbppConfig& config = {},
                         const kalman::FilterConfig& filter = kalman::FilterConfig::defaults());

/// Detection-based baseline: the max-response box of every observation.
std::vector<Box> dbpp_baseline(std::span<const FrameObservation> stream);

}  // namespace trackpp::mbpp
