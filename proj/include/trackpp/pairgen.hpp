#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>

#include "trackpp/box.hpp"

namespace trackpp::pairgen {

enum class Domain { underwater, open_air };

std::string_view domain_name(Domain d);
Domain parse_domain(std::string_view text);

/// One still image from a detection dataset with its annotated boxes.
struct DetectionRecord {
    std::filesystem::path image;
    std::vector<Box> boxes;
    Domain domain = Domain::underwater;
    std::string dataset;
};

// ---------------------------------------------------------------------------
// Cropping

struct CropSettings {
    double template_factor = 2.0;
    double search_factor = 4.0;
    int template_size = 128;
    int search_size = 256;
};

/// Square crop of side sqrt(w*h)*factor centered on the target, resampled to
/// out_size x out_size. Regions outside the image take the per-channel mean of
/// the part of the crop that lies inside it.
struct SquareCrop {
    cv::Mat raster;
    double origin_x = 0.0;  ///< crop's top-left corner in image coordinates
    double origin_y = 0.0;
    double scale = 1.0;     ///< output pixels per image pixel
    cv::Scalar fill;

    Box to_crop(const Box& image_box) const;
    Box to_image(const Box& crop_box) const;
};

SquareCrop crop_square(const cv::Mat& image, const Box& target, double factor, int out_size);

struct CropPair {
    cv::Mat template_patch;
    cv::Mat search;
    Box search_box;  ///< target in search-raster coordinates, clipped to the raster
    SquareCrop search_crop;
};

/// Throws Error when the target is degenerate or lies fully outside the image.
CropPair crop_pair(const cv::Mat& image, const Box& target, const CropSettings& settings = {});

// ---------------------------------------------------------------------------
// Augmentation

enum class AugOp { grayscale, hflip, noise, blur, rotate };
inline constexpr std::array<AugOp, 5> kAugOrder = {AugOp::grayscale, AugOp::hflip, AugOp::noise,
                                                   AugOp::blur, AugOp::rotate};
std::string_view op_name(AugOp op);

struct AugmentationConfig {
    double p_grayscale = 0.10;
    double p_hflip = 0.15;
    double p_noise = 0.05;
    double p_blur = 0.05;
    double p_rotate = 0.05;
    double rotate_min_deg = 0.0;
    double rotate_max_deg = 10.0;
    double noise_sigma = 5.0 / 255.0;  ///< per channel, on a [0, 1] intensity scale
    int blur_kernel = 5;
    double blur_sigma = 1.0;

    double probability(AugOp op) const;
    void validate() const;
};

/// The random decisions for one augmentation call, all drawn up front from the seed.
struct AugmentationPlan {
    std::array<bool, 5> fire{};  ///< indexed like kAugOrder
    double angle_deg = 0.0;
    std::uint64_t noise_seed = 0;

    bool fires(AugOp op) const { return fire[static_cast<std::size_t>(op)]; }
    std::vector<AugOp> ops() const;
};

AugmentationPlan draw_plan(const AugmentationConfig& config, std::uint64_t seed);

struct Augmented {
    cv::Mat raster;
    Box box;
    std::vector<AugOp> applied_ops;
};

/// Applies each op independently with its probability, in kAugOrder.
Augmented augment(const cv::Mat& search, const Box& search_box, const AugmentationConfig& config,
                  std::uint64_t seed);
Augmented apply_plan(const cv::Mat& search, const Box& search_box, const AugmentationConfig& config,
                     const AugmentationPlan& plan);

// ---------------------------------------------------------------------------
// Sampling

struct DatasetPool {
    std::string id;
    Domain domain = Domain::underwater;
    std::vector<DetectionRecord> records;
};

struct SamplerConfig {
    std::map<std::string, double> weights;  ///< per dataset id; missing ids weigh 1
    int epoch_size = 1000;
    /// Target open-air:underwater draw ratio. When both domains are present the
    /// domain shares are fixed to this ratio and dataset weights split each
    /// share. 0 disables the rebalancing and draws by raw weight.
    double open_air_per_underwater = 2.0;

    void validate() const;
};

struct ManifestEntry {
    std::string dataset;
    Domain domain = Domain::underwater;
    std::filesystem::path image;
    std::size_t record_index = 0;
    std::size_t box_index = 0;
    Box box;
    std::uint64_t seed = 0;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Per-dataset draw probabilities in pool order.
std::vector<double> dataset_probabilities(std::span<const DatasetPool> pools, const SamplerConfig& sampler);

/// epoch_size draws: dataset by probability, image uniform within the dataset,
/// box uniform within the image. Throws Error when no dataset can be drawn.
std::vector<ManifestEntry> sample_epoch(std::span<const DatasetPool> pools, const SamplerConfig& sampler,
                                        std::uint64_t seed);

struct SamplePair {
    cv::Mat template_patch;
    cv::Mat search;
    Box search_box;
    std::vector<AugOp> applied_ops;
    std::uint64_t seed = 0;
};

/// Crop the template and search area around the target, then augment the
/// search area. Fully determined by (image, target, seed, settings).
SamplePair make_pair(const cv::Mat& image, const Box& target, std::uint64_t seed,
                     const CropSettings& crop = {}, const AugmentationConfig& aug = {});

// ---------------------------------------------------------------------------
// Files

/// Reads the detection manifest. Relative image paths resolve against the manifest's directory.
std::vector<DetectionRecord> read_detection_manifest(const std::filesystem::path& path);

/// Groups records by dataset id in order of first appearance; records without boxes are dropped.
std::vector<DatasetPool> group_by_dataset(std::span<const DetectionRecord> records);

cv::Mat load_image(const std::filesystem::path& path);

/// One output manifest line for a generated pair.
std::string pair_record(std::size_t index, const ManifestEntry& entry, const SamplePair& pair);

}  // namespace trackpp::pairgen
