#include "trackpp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "trackpp/error.hpp"

namespace trackpp::sim {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw Error("invalid scene config: " + what, ErrorKind::usage);
    }
}

void check_events(const std::vector<Event>& events, int num_frames, const char* kind) {
    for (const Event& e : events) {
        require(e.start >= 0 && e.duration >= 1 && e.start + e.duration <= num_frames,
                std::string(kind) + " event must lie within [0, num_frames)");
    }
}

struct Agent {
    double cx = 0.0;
    double cy = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double speed = 0.0;
};

// Reflects a coordinate into [lo, hi], flipping the velocity on each bounce.
void reflect(double& pos, double& vel, double lo, double hi) {
    for (int guard = 0; guard < 8 && (pos < lo || pos > hi); ++guard) {
        if (pos < lo) {
            pos = 2.0 * lo - pos;
            vel = -vel;
        } else {
            pos = 2.0 * hi - pos;
            vel = -vel;
        }
    }
    pos = std::clamp(pos, lo, hi);
}

double clamp01(double v) {
    return std::clamp(v, 0.0, 1.0);
}

}  // namespace

void SceneConfig::validate() const {
    require(arena_width > 0.0 && arena_height > 0.0, "arena dimensions must be positive");
    require(num_frames >= 2, "num_frames must be at least 2");
    require(num_distractors >= 0, "num_distractors must be non-negative");
    require(num_clutter >= 0, "num_clutter must be non-negative");
    require(target_width > 0.0 && target_height > 0.0, "target size must be positive");
    require(target_width < arena_width && target_height < arena_height, "target must fit inside the arena");
    require(speed_std >= 0.0 && velocity_noise_std >= 0.0 && size_jitter_std >= 0.0 && target_score_std >= 0.0 &&
                distractor_score_std >= 0.0 && clutter_score_std >= 0.0,
            "standard deviations must be non-negative");
    require(speed_mean >= 0.0, "speed_mean must be non-negative");
    require(wall_margin >= 0.0 && wall_turn_accel >= 0.0, "wall_margin and wall_turn_accel must be non-negative");
    for (double m : {target_score_mean, distractor_score_mean, swap_score_mean, clutter_score_mean}) {
        require(m >= 0.0 && m <= 1.0, "score means must lie in [0, 1]");
    }
    require(num_candidates >= num_distractors + 1, "num_candidates must cover the target and every distractor");
    require(nms_threshold >= 0.0 && nms_threshold <= 1.0, "nms_threshold must lie in [0, 1]");
    check_events(swap_events, num_frames, "swap");
    check_events(occlusion_events, num_frames, "occlusion");
    require(swap_events.empty() || num_distractors >= 1, "swap events need at least one distractor");
}

bool SceneConfig::in_swap(int frame) const {
    return std::any_of(swap_events.begin(), swap_events.end(), [&](const Event& e) { return e.contains(frame); });
}

bool SceneConfig::in_occlusion(int frame) const {
    return std::any_of(occlusion_events.begin(), occlusion_events.end(),
                       [&](const Event& e) { return e.contains(frame); });
}

io::CandidateStream SyntheticSequence::candidate_stream() const {
    io::CandidateStream s;
    s.header.sequence = config.name;
    s.header.init_box = ground_truth.front();
    s.header.width = static_cast<int>(std::lround(config.arena_width));
    s.header.height = static_cast<int>(std::lround(config.arena_height));
    s.frames = stream;
    return s;
}

SyntheticSequence generate(const SceneConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto normal = [&](double mean, double sd) { return mean + sd * unit_normal(rng); };

    const int num_agents = config.num_distractors + 1;
    const double half_w = 0.5 * config.target_width;
    const double half_h = 0.5 * config.target_height;
    const double lo_x = half_w;
    const double hi_x = config.arena_width - half_w;
    const double lo_y = half_h;
    const double hi_y = config.arena_height - half_h;

    std::vector<Agent> agents(static_cast<std::size_t>(num_agents));
    for (Agent& a : agents) {
        a.cx = lo_x + unit(rng) * (hi_x - lo_x);
        a.cy = lo_y + unit(rng) * (hi_y - lo_y);
        const double heading = unit(rng) * 2.0 * std::numbers::pi;
        a.speed = std::max(0.0, normal(config.speed_mean, config.speed_std));
        a.vx = a.speed * std::cos(heading);
        a.vy = a.speed * std::sin(heading);
    }

    SyntheticSequence seq;
    seq.config = config;
    for (std::size_t e = 0; e < config.swap_events.size(); ++e) {
        seq.swap_agents.push_back(1 + static_cast<int>(unit(rng) * config.num_distractors) % config.num_distractors);
    }

    const auto wall_push = [&](double pos, double lo, double hi) {
        if (pos - lo < config.wall_margin) {
            return config.wall_turn_accel;
        }
        if (hi - pos < config.wall_margin) {
            return -config.wall_turn_accel;
        }
        return 0.0;
    };

    const auto swap_agent_at = [&](int frame) {
        for (std::size_t e = 0; e < config.swap_events.size(); ++e) {
            if (config.swap_events[e].contains(frame)) {
                return seq.swap_agents[e];
            }
        }
        return -1;
    };

    seq.ground_truth.reserve(static_cast<std::size_t>(config.num_frames));
    seq.identities.reserve(static_cast<std::size_t>(config.num_frames));
    seq.stream.reserve(static_cast<std::size_t>(config.num_frames - 1));

    for (int frame = 0; frame < config.num_frames; ++frame) {
        if (frame > 0) {
            for (Agent& a : agents) {
                a.vx += normal(0.0, config.velocity_noise_std) + wall_push(a.cx, lo_x, hi_x);
                a.vy += normal(0.0, config.velocity_noise_std) + wall_push(a.cy, lo_y, hi_y);
                // Noise and wall push steer the heading; speed stays at the agent's own value.
                const double norm = std::hypot(a.vx, a.vy);
                if (norm > 0.0) {
                    a.vx *= a.speed / norm;
                    a.vy *= a.speed / norm;
                }
                a.cx += a.vx;
                a.cy += a.vy;
                reflect(a.cx, a.vx, lo_x, hi_x);
                reflect(a.cy, a.vy, lo_y, hi_y);
            }
        }

        std::vector<Box> boxes;
        boxes.reserve(agents.size());
        for (const Agent& a : agents) {
            const double w = std::max(4.0, config.target_width + normal(0.0, config.size_jitter_std));
            const double h = std::max(4.0, config.target_height + normal(0.0, config.size_jitter_std));
            boxes.push_back(clamp_to(from_center({a.cx, a.cy, w, h}), config.arena_width, config.arena_height));
        }

        // Scores are drawn every frame, including frame 0, so the random stream
        // does not depend on which frames are emitted.
        const int swapped = swap_agent_at(frame);
        std::vector<ScoredBox> agent_boxes;
        const bool occluded = config.in_occlusion(frame);
        for (int i = 0; i < num_agents; ++i) {
            double score = 0.0;
            if (i == 0) {
                score = clamp01(normal(config.target_score_mean, config.target_score_std));
            } else {
                const double mean = i == swapped ? config.swap_score_mean : config.distractor_score_mean;
                score = clamp01(normal(mean, config.distractor_score_std));
            }
            if (i == 0 && occluded) {
                continue;
            }
            agent_boxes.push_back({boxes[static_cast<std::size_t>(i)], score});
        }

        std::vector<ScoredBox> clutter;
        clutter.reserve(static_cast<std::size_t>(config.num_clutter));
        for (int c = 0; c < config.num_clutter; ++c) {
            const double w = config.target_width * (0.5 + unit(rng));
            const double h = config.target_height * (0.5 + unit(rng));
            const double x = unit(rng) * (config.arena_width - w);
            const double y = unit(rng) * (config.arena_height - h);
            clutter.push_back({{x, y, w, h}, clamp01(normal(config.clutter_score_mean, config.clutter_score_std))});
        }

        seq.ground_truth.push_back(boxes.front());
        seq.identities.push_back(std::move(boxes));
        if (frame == 0) {
            continue;
        }

        // Agents are distinct instances and always survive; clutter is suppressed
        // against agents and against higher-scoring clutter.
        std::stable_sort(clutter.begin(), clutter.end(),
                         [](const ScoredBox& a, const ScoredBox& b) { return a.score > b.score; });
        std::vector<ScoredBox> kept = agent_boxes;
        for (const ScoredBox& c : clutter) {
            const bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const ScoredBox& k) {
                return iou(k.box, c.box) >= config.nms_threshold;
            });
            if (!overlaps) {
                kept.push_back(c);
            }
        }
        std::stable_sort(kept.begin(), kept.end(),
                         [](const ScoredBox& a, const ScoredBox& b) { return a.score > b.score; });
        if (kept.size() > static_cast<std::size_t>(config.num_candidates)) {
            kept.resize(static_cast<std::size_t>(config.num_candidates));
        }
        if (kept.empty()) {
            // Occluded target, no distractors, no clutter: emit the ground-truth
            // location with zero score so the frame still has a candidate.
            kept.push_back({seq.ground_truth.back(), 0.0});
        }

        mbpp::FrameObservation obs;
        obs.frame = frame;
        obs.max = kept.front();
        obs.candidates = std::move(kept);
        seq.stream.push_back(std::move(obs));
    }
    return seq;
}

}  // namespace trackpp::sim
