#include "trackpp/mbpp.hpp"

#include <string>

#include "trackpp/error.hpp"

namespace trackpp::mbpp {

void MbppConfig::validate() const {
    if (!(conf >= 0.0 && conf <= 1.0)) {
        throw Error("mbpp config: conf must lie in [0, 1]", ErrorKind::usage);
    }
}

double location_score(const ScoredBox& candidate, const Box& estimation) {
    return candidate.score * iou(candidate.box, estimation);
}

TrackerSession::TrackerSession(const Box& init_box, const MbppConfig& config,
                               const kalman::FilterConfig& filter)
    : kf_(kalman::init(init_box, filter)), config_(config), filter_(filter), last_output_(init_box) {}

TrackerSession TrackerSession::start(const Box& init_box, const MbppConfig& config,
                                     const kalman::FilterConfig& filter) {
    config.validate();
    filter.validate();
    return TrackerSession(init_box, config, filter);
}

StepResult TrackerSession::step(const FrameObservation& obs) {
    if (obs.candidates.empty()) {
        throw Error("no candidates");
    }

    const kalman::Prediction pred = kalman::predict(kf_, filter_);
    StepResult out;
    StepDiagnostics& diag = out.diagnostics;
    diag.estimation = pred.estimation;
    diag.kf_clamped = pred.clamped;
    diag.max_iou = iou(obs.max.box, pred.estimation);

    if (diag.max_iou >= config_.conf) {
        out.box = obs.max.box;
        diag.chosen_index = 0;
        diag.source = Source::max_response;
    } else {
        diag.drift_detected = true;
        diag.scores.reserve(obs.candidates.size());
        int best = -1;
        double best_score = 0.0;
        for (std::size_t i = 0; i < obs.candidates.size(); ++i) {
            const double s = location_score(obs.candidates[i], pred.estimation);
            diag.scores.push_back(s);
            if (s > best_score) {
                best_score = s;
                best = static_cast<int>(i);
            }
        }
        if (best >= 0) {
            out.box = obs.candidates[static_cast<std::size_t>(best)].box;
            diag.chosen_index = best;
            diag.source = Source::candidate;
        } else if (config_.fallback == Fallback::estimation_box) {
            out.box = pred.estimation;
            diag.chosen_index = -1;
            diag.source = Source::fallback_estimation;
        } else {
            out.box = obs.max.box;
            diag.chosen_index = 0;
            diag.source = Source::fallback_max_response;
        }
    }

    const bool wants_update =
        config_.update_policy == UpdatePolicy::always || !diag.drift_detected;
    if (wants_update && !out.box.is_degenerate()) {
        kf_ = kalman::update(pred.state, out.box, filter_);
        diag.kf_updated = true;
    } else {
        kf_ = kalman::coast(pred.state);
    }
    last_output_ = out.box;
    ++frame_count_;
    return out;
}

SequenceRun run_sequence(std::span<const FrameObservation> stream, const Box& init_box,
                         const MbppConfig& config, const kalman::FilterConfig& filter) {
    TrackerSession session = TrackerSession::start(init_box, config, filter);
    SequenceRun run;
    run.trajectory.reserve(stream.size() + 1);
    run.diagnostics.reserve(stream.size());
    run.trajectory.push_back(init_box);
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const int expected = static_cast<int>(i) + 1;
        if (stream[i].frame != expected) {
            throw Error("non-contiguous frame index: expected " + std::to_string(expected) + ", got " +
                        std::to_string(stream[i].frame));
        }
        StepResult r = session.step(stream[i]);
        run.trajectory.push_back(r.box);
        run.diagnostics.push_back(std::move(r.diagnostics));
    }
    return run;
}

std::vector<Box> dbpp_baseline(std::span<const FrameObservation> stream) {
    std::vector<Box> out;
    out.reserve(stream.size());
    for (const FrameObservation& obs : stream) {
        out.push_back(obs.max.box);
    }
    return out;
}

}  // namespace trackpp::mbpp
