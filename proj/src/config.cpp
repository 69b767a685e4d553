#include "trackpp/config.hpp"

#include <functional>
#include <set>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "trackpp/error.hpp"

namespace trackpp::config {

namespace {

struct Field {
    std::string key;
    std::function<void(const YAML::Node&)> set;
    std::function<YAML::Node()> get;
};

struct Section {
    std::string name;
    std::vector<Field> fields;
};

YAML::Node scalar(double v) {
    return YAML::Node(io::format_number(v));
}

Field number(std::string key, double& ref) {
    return {std::move(key), [&ref](const YAML::Node& n) { ref = n.as<double>(); },
            [&ref] { return scalar(ref); }};
}

Field integer(std::string key, int& ref) {
    return {std::move(key), [&ref](const YAML::Node& n) { ref = n.as<int>(); }, [&ref] { return YAML::Node(ref); }};
}

Field unsigned64(std::string key, std::uint64_t& ref) {
    return {std::move(key), [&ref](const YAML::Node& n) { ref = n.as<std::uint64_t>(); },
            [&ref] { return YAML::Node(ref); }};
}

Field text(std::string key, std::string& ref) {
    return {std::move(key), [&ref](const YAML::Node& n) { ref = n.as<std::string>(); },
            [&ref] { return YAML::Node(ref); }};
}

// Square covariance: a list of N numbers is the diagonal, a list of N lists is the full matrix.
template <int N>
Field matrix(std::string key, Eigen::Matrix<double, N, N>& ref) {
    const std::string name = key;
    return {std::move(key),
            [&ref, name](const YAML::Node& n) {
                if (!n.IsSequence() || n.size() != static_cast<std::size_t>(N)) {
                    throw Error("filter." + name + " must list " + std::to_string(N) + " diagonal entries or " +
                                    std::to_string(N) + " rows",
                                ErrorKind::usage);
                }
                Eigen::Matrix<double, N, N> m = Eigen::Matrix<double, N, N>::Zero();
                for (int i = 0; i < N; ++i) {
                    const YAML::Node row = n[static_cast<std::size_t>(i)];
                    if (row.IsSequence()) {
                        if (row.size() != static_cast<std::size_t>(N)) {
                            throw Error("filter." + name + " row " + std::to_string(i) + " has wrong length",
                                        ErrorKind::usage);
                        }
                        for (int j = 0; j < N; ++j) {
                            m(i, j) = row[static_cast<std::size_t>(j)].as<double>();
                        }
                    } else {
                        m(i, i) = row.as<double>();
                    }
                }
                ref = m;
            },
            [&ref] {
                YAML::Node out(YAML::NodeType::Sequence);
                const bool diagonal = (ref - Eigen::Matrix<double, N, N>(ref.diagonal().asDiagonal())).isZero(0.0);
                for (int i = 0; i < N; ++i) {
                    if (diagonal) {
                        out.push_back(scalar(ref(i, i)));
                    } else {
                        YAML::Node row(YAML::NodeType::Sequence);
                        for (int j = 0; j < N; ++j) {
                            row.push_back(scalar(ref(i, j)));
                        }
                        row.SetStyle(YAML::EmitterStyle::Flow);
                        out.push_back(row);
                    }
                }
                if (diagonal) {
                    out.SetStyle(YAML::EmitterStyle::Flow);
                }
                return out;
            }};
}

Field events(std::string key, std::vector<sim::Event>& ref) {
    return {std::move(key),
            [&ref](const YAML::Node& n) {
                std::vector<sim::Event> out;
                for (const YAML::Node& e : n) {
                    if (e.IsSequence() && e.size() == 2) {
                        out.push_back({e[0].as<int>(), e[1].as<int>()});
                    } else if (e.IsMap()) {
                        out.push_back({e["start"].as<int>(), e["duration"].as<int>()});
                    } else {
                        throw Error("events must be [start, duration] pairs", ErrorKind::usage);
                    }
                }
                ref = std::move(out);
            },
            [&ref] {
                YAML::Node out(YAML::NodeType::Sequence);
                for (const sim::Event& e : ref) {
                    YAML::Node pair(YAML::NodeType::Sequence);
                    pair.push_back(e.start);
                    pair.push_back(e.duration);
                    pair.SetStyle(YAML::EmitterStyle::Flow);
                    out.push_back(pair);
                }
                out.SetStyle(YAML::EmitterStyle::Flow);
                return out;
            }};
}

Field weights(std::string key, std::map<std::string, double>& ref) {
    return {std::move(key),
            [&ref](const YAML::Node& n) {
                if (!n.IsMap() && !n.IsNull()) {
                    throw Error("sampler.weights must map dataset ids to weights", ErrorKind::usage);
                }
                std::map<std::string, double> out;
                for (const auto& kv : n) {
                    out[kv.first.as<std::string>()] = kv.second.as<double>();
                }
                ref = std::move(out);
            },
            [&ref] {
                YAML::Node out(YAML::NodeType::Map);
                for (const auto& [k, v] : ref) {
                    out[k] = scalar(v);
                }
                if (ref.empty()) {
                    out.SetStyle(YAML::EmitterStyle::Flow);
                }
                return out;
            }};
}

template <typename Enum>
Field enumeration(std::string key, Enum& ref, std::vector<std::pair<std::string, Enum>> names) {
    const std::string name = key;
    return {std::move(key),
            [&ref, names, name](const YAML::Node& n) {
                const std::string v = n.as<std::string>();
                for (const auto& [text, value] : names) {
                    if (text == v) {
                        ref = value;
                        return;
                    }
                }
                throw Error("unknown value \"" + v + "\" for " + name, ErrorKind::usage);
            },
            [&ref, names] {
                for (const auto& [text, value] : names) {
                    if (value == ref) {
                        return YAML::Node(text);
                    }
                }
                return YAML::Node();
            }};
}

std::vector<Section> bind(RunConfig& c) {
    std::vector<Section> s;
    s.push_back({"mbpp",
                 {number("conf", c.mbpp.conf),
                  enumeration("update_policy", c.mbpp.update_policy,
                              {{"always", mbpp::UpdatePolicy::always},
                               {"accepted_only", mbpp::UpdatePolicy::accepted_only}}),
                  enumeration("fallback", c.mbpp.fallback,
                              {{"max_response", mbpp::Fallback::max_response},
                               {"estimation_box", mbpp::Fallback::estimation_box}})}});
    s.push_back({"filter", {matrix<7>("q", c.filter.Q), matrix<4>("r", c.filter.R), matrix<7>("p0", c.filter.P0)}});
    s.push_back({"candidates", {integer("n", c.candidates.n), number("nms_threshold", c.candidates.nms_threshold)}});
    sim::SceneConfig& sc = c.scene;
    s.push_back({"scene",
                 {text("name", sc.name),
                  number("arena_width", sc.arena_width),
                  number("arena_height", sc.arena_height),
                  integer("num_frames", sc.num_frames),
                  integer("num_distractors", sc.num_distractors),
                  number("speed_mean", sc.speed_mean),
                  number("speed_std", sc.speed_std),
                  number("velocity_noise_std", sc.velocity_noise_std),
                  number("wall_margin", sc.wall_margin),
                  number("wall_turn_accel", sc.wall_turn_accel),
                  number("target_width", sc.target_width),
                  number("target_height", sc.target_height),
                  number("size_jitter_std", sc.size_jitter_std),
                  number("target_score_mean", sc.target_score_mean),
                  number("target_score_std", sc.target_score_std),
                  number("distractor_score_mean", sc.distractor_score_mean),
                  number("distractor_score_std", sc.distractor_score_std),
                  number("swap_score_mean", sc.swap_score_mean),
                  number("clutter_score_mean", sc.clutter_score_mean),
                  number("clutter_score_std", sc.clutter_score_std),
                  integer("num_clutter", sc.num_clutter),
                  integer("num_candidates", sc.num_candidates),
                  number("nms_threshold", sc.nms_threshold),
                  events("swap_events", sc.swap_events),
                  events("occlusion_events", sc.occlusion_events),
                  unsigned64("seed", sc.seed)}});
    s.push_back({"sampler",
                 {weights("weights", c.sampler.weights), integer("epoch_size", c.sampler.epoch_size),
                  number("open_air_per_underwater", c.sampler.open_air_per_underwater)}});
    pairgen::AugmentationConfig& a = c.augmentation;
    s.push_back({"augmentation",
                 {number("p_grayscale", a.p_grayscale), number("p_hflip", a.p_hflip), number("p_noise", a.p_noise),
                  number("p_blur", a.p_blur), number("p_rotate", a.p_rotate),
                  number("rotate_min_deg", a.rotate_min_deg), number("rotate_max_deg", a.rotate_max_deg),
                  number("noise_sigma", a.noise_sigma), integer("blur_kernel", a.blur_kernel),
                  number("blur_sigma", a.blur_sigma)}});
    s.push_back({"crop",
                 {number("template_factor", c.crop.template_factor), number("search_factor", c.crop.search_factor),
                  integer("template_size", c.crop.template_size), integer("search_size", c.crop.search_size)}});
    return s;
}

Field& find_field(std::vector<Section>& sections, const std::string& section, const std::string& key) {
    for (Section& s : sections) {
        if (s.name != section) {
            continue;
        }
        for (Field& f : s.fields) {
            if (f.key == key) {
                return f;
            }
        }
        throw Error("unknown config key \"" + section + "." + key + "\"", ErrorKind::usage);
    }
    throw Error("unknown config section \"" + section + "\"", ErrorKind::usage);
}

void set_field(Field& f, const std::string& path, const YAML::Node& value) {
    try {
        f.set(value);
    } catch (const YAML::Exception&) {
        throw Error("invalid value for config key \"" + path + "\"", ErrorKind::usage);
    }
}

void merge_node(RunConfig& config, const YAML::Node& root) {
    if (root.IsNull()) {
        return;
    }
    if (!root.IsMap()) {
        throw Error("config document must be a mapping of sections", ErrorKind::usage);
    }
    std::vector<Section> sections = bind(config);
    for (const auto& sec : root) {
        const std::string name = sec.first.as<std::string>();
        if (sec.second.IsNull()) {
            continue;
        }
        if (!sec.second.IsMap()) {
            throw Error("config section \"" + name + "\" must be a mapping", ErrorKind::usage);
        }
        for (const auto& kv : sec.second) {
            const std::string key = kv.first.as<std::string>();
            set_field(find_field(sections, name, key), name + "." + key, kv.second);
        }
    }
}

}  // namespace

void RunConfig::validate() const {
    // Every value here came from the user, so any rejection is a usage error.
    try {
        mbpp.validate();
        filter.validate();
        if (candidates.n < 1) {
            throw Error("candidates.n must be at least 1", ErrorKind::usage);
        }
        if (!(candidates.nms_threshold >= 0.0 && candidates.nms_threshold <= 1.0)) {
            throw Error("candidates.nms_threshold must lie in [0, 1]", ErrorKind::usage);
        }
        scene.validate();
        sampler.validate();
        augmentation.validate();
        if (!(crop.template_factor > 1.0 && crop.search_factor > 1.0) || crop.template_size < 1 || crop.search_size < 1) {
            throw Error("crop factors must exceed 1 and sizes must be positive", ErrorKind::usage);
        }
    } catch (const Error& e) {
        throw Error(e.what(), ErrorKind::usage);
    }
}

RunConfig load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw Error("config file not found: " + path.string(), ErrorKind::usage);
    }
    RunConfig c;
    try {
        merge_node(c, YAML::LoadFile(path.string()));
    } catch (const YAML::Exception& e) {
        throw Error(path.string() + ": " + e.what(), ErrorKind::usage);
    }
    return c;
}

RunConfig parse(std::string_view yaml_text) {
    RunConfig c;
    merge(c, yaml_text);
    return c;
}

void merge(RunConfig& config, std::string_view yaml_text) {
    try {
        merge_node(config, YAML::Load(std::string(yaml_text)));
    } catch (const YAML::Exception& e) {
        throw Error(std::string("config: ") + e.what(), ErrorKind::usage);
    }
}

void apply_override(RunConfig& config, std::string_view assignment) {
    const std::size_t eq = assignment.find('=');
    const std::size_t dot = assignment.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
        throw Error("override must look like section.key=value: " + std::string(assignment), ErrorKind::usage);
    }
    const std::string section(assignment.substr(0, dot));
    const std::string key(assignment.substr(dot + 1, eq - dot - 1));
    YAML::Node value;
    try {
        value = YAML::Load(std::string(assignment.substr(eq + 1)));
    } catch (const YAML::Exception& e) {
        throw Error("override " + std::string(assignment) + ": " + e.what(), ErrorKind::usage);
    }
    std::vector<Section> sections = bind(config);
    set_field(find_field(sections, section, key), section + "." + key, value);
}

std::string to_yaml(const RunConfig& config) {
    RunConfig copy = config;
    YAML::Node root(YAML::NodeType::Map);
    for (const Section& s : bind(copy)) {
        YAML::Node sec(YAML::NodeType::Map);
        for (const Field& f : s.fields) {
            sec[f.key] = f.get();
        }
        root[s.name] = sec;
    }
    YAML::Emitter out;
    out << root;
    return std::string(out.c_str()) + "\n";
}

std::string_view policy_name(mbpp::UpdatePolicy p) {
    return p == mbpp::UpdatePolicy::always ? "always" : "accepted_only";
}

std::string_view fallback_name(mbpp::Fallback f) {
    return f == mbpp::Fallback::max_response ? "max_response" : "estimation_box";
}

}  // namespace trackpp::config
