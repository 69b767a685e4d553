#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "trackpp/kalman.hpp"
#include "trackpp/mbpp.hpp"
#include "trackpp/pairgen.hpp"
#include "trackpp/simulator.hpp"
#include "trackpp/stream_io.hpp"

namespace trackpp::config {

/// Every tunable in one place. Loaded from a YAML document with one mapping
/// per section (mbpp, filter, candidates, scene, sampler, augmentation, crop);
/// absent keys keep their defaults and unknown keys are rejected. The schema is
/// documented in docs/config.md.
struct RunConfig {
    mbpp::MbppConfig mbpp;
    kalman::FilterConfig filter = kalman::FilterConfig::defaults();
    io::ResponseOptions candidates;
    sim::SceneConfig scene;
    pairgen::SamplerConfig sampler;
    pairgen::AugmentationConfig augmentation;
    pairgen::CropSettings crop;

    void validate() const;
};

RunConfig load(const std::filesystem::path& path);
RunConfig parse(std::string_view yaml_text);

/// Merge a YAML document into an existing config.
void merge(RunConfig& config, std::string_view yaml_text);

/// Apply one "section.key=value" override; the value is parsed as YAML.
void apply_override(RunConfig& config, std::string_view assignment);

/// Fully resolved config as a YAML document that parse() accepts.
std::string to_yaml(const RunConfig& config);

std::string_view policy_name(mbpp::UpdatePolicy p);
std::string_view fallback_name(mbpp::Fallback f);

}  // namespace trackpp::config
