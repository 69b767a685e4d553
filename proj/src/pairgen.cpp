#include "trackpp/pairgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "trackpp/error.hpp"

namespace trackpp::pairgen {

using nlohmann::json;

std::string_view domain_name(Domain d) {
    return d == Domain::underwater ? "underwater" : "open-air";
}

Domain parse_domain(std::string_view text) {
    if (text == "underwater") {
        return Domain::underwater;
    }
    if (text == "open-air" || text == "open_air") {
        return Domain::open_air;
    }
    throw Error("unknown domain \"" + std::string(text) + "\" (expected underwater or open-air)");
}

// ---------------------------------------------------------------------------
// Cropping

Box SquareCrop::to_crop(const Box& b) const {
    return {(b.x - origin_x) * scale, (b.y - origin_y) * scale, b.w * scale, b.h * scale};
}

Box SquareCrop::to_image(const Box& b) const {
    return {b.x / scale + origin_x, b.y / scale + origin_y, b.w / scale, b.h / scale};
}

SquareCrop crop_square(const cv::Mat& image, const Box& target, double factor, int out_size) {
    if (image.empty()) {
        throw Error("crop: empty image");
    }
    if (target.is_degenerate()) {
        throw Error("degenerate box");
    }
    if (!(factor > 1.0) || out_size < 1) {
        throw Error("crop: factor must exceed 1 and output size must be positive", ErrorKind::usage);
    }
    const Box bounds{0.0, 0.0, static_cast<double>(image.cols), static_cast<double>(image.rows)};
    if (!(intersection_area(target, bounds) > 0.0)) {
        throw Error("crop: target lies outside the image");
    }

    const double side = std::sqrt(target.w * target.h) * factor;
    SquareCrop crop;
    crop.origin_x = target.cx() - 0.5 * side;
    crop.origin_y = target.cy() - 0.5 * side;
    crop.scale = static_cast<double>(out_size) / side;

    // Pixel grid covered by the crop, restricted to the image.
    const int x0 = std::clamp(static_cast<int>(std::floor(crop.origin_x)), 0, image.cols);
    const int y0 = std::clamp(static_cast<int>(std::floor(crop.origin_y)), 0, image.rows);
    const int x1 = std::clamp(static_cast<int>(std::ceil(crop.origin_x + side)), 0, image.cols);
    const int y1 = std::clamp(static_cast<int>(std::ceil(crop.origin_y + side)), 0, image.rows);
    crop.fill = (x1 > x0 && y1 > y0) ? cv::mean(image(cv::Rect(x0, y0, x1 - x0, y1 - y0))) : cv::mean(image);
    for (int c = 0; c < 4; ++c) {
        crop.fill[c] = std::round(crop.fill[c]);
    }

    // Pixel centers: output j+0.5 <-> image origin + (j+0.5)/scale.
    const double s = crop.scale;
    cv::Matx23d m(s, 0.0, (0.5 - crop.origin_x) * s - 0.5,
                  0.0, s, (0.5 - crop.origin_y) * s - 0.5);
    cv::warpAffine(image, crop.raster, m, cv::Size(out_size, out_size), cv::INTER_LINEAR,
                   cv::BORDER_CONSTANT, crop.fill);
    return crop;
}

CropPair crop_pair(const cv::Mat& image, const Box& target, const CropSettings& settings) {
    CropPair out;
    out.template_patch = crop_square(image, target, settings.template_factor, settings.template_size).raster;
    out.search_crop = crop_square(image, target, settings.search_factor, settings.search_size);
    out.search = out.search_crop.raster;
    out.search_box = clamp_to(out.search_crop.to_crop(target), settings.search_size, settings.search_size);
    return out;
}

// ---------------------------------------------------------------------------
// Augmentation

std::string_view op_name(AugOp op) {
    switch (op) {
        case AugOp::grayscale: return "grayscale";
        case AugOp::hflip: return "hflip";
        case AugOp::noise: return "noise";
        case AugOp::blur: return "blur";
        case AugOp::rotate: return "rotate";
    }
    return "unknown";
}

double AugmentationConfig::probability(AugOp op) const {
    switch (op) {
        case AugOp::grayscale: return p_grayscale;
        case AugOp::hflip: return p_hflip;
        case AugOp::noise: return p_noise;
        case AugOp::blur: return p_blur;
        case AugOp::rotate: return p_rotate;
    }
    return 0.0;
}

void AugmentationConfig::validate() const {
    for (AugOp op : kAugOrder) {
        const double p = probability(op);
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error("augmentation: probability for " + std::string(op_name(op)) + " outside [0, 1]",
                        ErrorKind::usage);
        }
    }
    if (!(rotate_min_deg <= rotate_max_deg)) {
        throw Error("augmentation: rotate range must satisfy min <= max", ErrorKind::usage);
    }
    if (!(noise_sigma >= 0.0) || !(blur_sigma > 0.0) || blur_kernel < 1 || blur_kernel % 2 == 0) {
        throw Error("augmentation: noise sigma >= 0, blur sigma > 0 and odd blur kernel required",
                    ErrorKind::usage);
    }
}

std::vector<AugOp> AugmentationPlan::ops() const {
    std::vector<AugOp> out;
    for (AugOp op : kAugOrder) {
        if (fires(op)) {
            out.push_back(op);
        }
    }
    return out;
}

AugmentationPlan draw_plan(const AugmentationConfig& config, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    AugmentationPlan plan;
    // Fixed number of draws so every decision is independent of the others.
    for (AugOp op : kAugOrder) {
        plan.fire[static_cast<std::size_t>(op)] = unit(rng) < config.probability(op);
    }
    std::uniform_real_distribution<double> angle(config.rotate_min_deg, config.rotate_max_deg);
    plan.angle_deg = config.rotate_min_deg == config.rotate_max_deg ? config.rotate_min_deg : angle(rng);
    plan.noise_seed = rng();
    return plan;
}

namespace {

cv::Mat add_gaussian_noise(const cv::Mat& src, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sigma * 255.0);
    cv::Mat out = src.clone();
    const int channels = out.channels();
    for (int r = 0; r < out.rows; ++r) {
        auto* row = out.ptr<std::uint8_t>(r);
        for (int i = 0; i < out.cols * channels; ++i) {
            row[i] = cv::saturate_cast<std::uint8_t>(static_cast<double>(row[i]) + dist(rng));
        }
    }
    return out;
}

Box rotated_hull(const Box& b, const cv::Matx23d& m, int width, int height) {
    const std::array<cv::Point2d, 4> corners = {cv::Point2d{b.x, b.y}, cv::Point2d{b.right(), b.y},
                                                cv::Point2d{b.x, b.bottom()},
                                                cv::Point2d{b.right(), b.bottom()}};
    double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
    for (const cv::Point2d& c : corners) {
        // Continuous coordinates -> pixel-index coordinates and back.
        const double px = c.x - 0.5;
        const double py = c.y - 0.5;
        const double qx = m(0, 0) * px + m(0, 1) * py + m(0, 2) + 0.5;
        const double qy = m(1, 0) * px + m(1, 1) * py + m(1, 2) + 0.5;
        min_x = std::min(min_x, qx);
        max_x = std::max(max_x, qx);
        min_y = std::min(min_y, qy);
        max_y = std::max(max_y, qy);
    }
    return clamp_to({min_x, min_y, max_x - min_x, max_y - min_y}, width, height);
}

}  // namespace

Augmented apply_plan(const cv::Mat& search, const Box& search_box, const AugmentationConfig& config,
                     const AugmentationPlan& plan) {
    Augmented out{search.clone(), search_box, plan.ops()};
    cv::Mat& img = out.raster;

    if (plan.fires(AugOp::grayscale) && img.channels() == 3) {
        cv::Mat gray;
        cv::cvtColor(img, gray, cv::COLOR_BGR2GRAY);
        cv::cvtColor(gray, img, cv::COLOR_GRAY2BGR);
    }
    if (plan.fires(AugOp::hflip)) {
        cv::Mat flipped;
        cv::flip(img, flipped, 1);
        img = flipped;
        out.box.x = static_cast<double>(img.cols) - out.box.x - out.box.w;
    }
    if (plan.fires(AugOp::noise)) {
        img = add_gaussian_noise(img, config.noise_sigma, plan.noise_seed);
    }
    if (plan.fires(AugOp::blur)) {
        cv::Mat blurred;
        cv::GaussianBlur(img, blurred, cv::Size(config.blur_kernel, config.blur_kernel), config.blur_sigma);
        img = blurred;
    }
    if (plan.fires(AugOp::rotate)) {
        const cv::Point2f center(0.5f * static_cast<float>(img.cols - 1), 0.5f * static_cast<float>(img.rows - 1));
        const cv::Matx23d m = cv::getRotationMatrix2D(center, plan.angle_deg, 1.0);
        cv::Scalar fill = cv::mean(img);
        for (int c = 0; c < 4; ++c) {
            fill[c] = std::round(fill[c]);
        }
        cv::Mat rotated;
        cv::warpAffine(img, rotated, m, img.size(), cv::INTER_LINEAR, cv::BORDER_CONSTANT, fill);
        img = rotated;
        out.box = rotated_hull(out.box, m, img.cols, img.rows);
    }
    return out;
}

Augmented augment(const cv::Mat& search, const Box& search_box, const AugmentationConfig& config,
                  std::uint64_t seed) {
    return apply_plan(search, search_box, config, draw_plan(config, seed));
}

// ---------------------------------------------------------------------------
// Sampling

void SamplerConfig::validate() const {
    if (epoch_size < 0) {
        throw Error("sampler: epoch_size must be non-negative", ErrorKind::usage);
    }
    for (const auto& [id, w] : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error("sampler: weight for dataset \"" + id + "\" must be a finite non-negative number",
                        ErrorKind::usage);
        }
    }
    if (!(open_air_per_underwater >= 0.0) || !std::isfinite(open_air_per_underwater)) {
        throw Error("sampler: open_air_per_underwater must be >= 0", ErrorKind::usage);
    }
}

std::vector<double> dataset_probabilities(std::span<const DatasetPool> pools, const SamplerConfig& sampler) {
    sampler.validate();
    std::vector<double> w(pools.size(), 0.0);
    double domain_total[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < pools.size(); ++i) {
        if (pools[i].records.empty()) {
            continue;
        }
        const auto it = sampler.weights.find(pools[i].id);
        w[i] = it == sampler.weights.end() ? 1.0 : it->second;
        domain_total[static_cast<int>(pools[i].domain)] += w[i];
    }
    const double total = domain_total[0] + domain_total[1];
    if (!(total > 0.0)) {
        throw Error("empty pool: no dataset with records and positive weight");
    }

    const bool rebalance = sampler.open_air_per_underwater > 0.0 && domain_total[0] > 0.0 && domain_total[1] > 0.0;
    const double open_share = sampler.open_air_per_underwater / (1.0 + sampler.open_air_per_underwater);
    for (std::size_t i = 0; i < pools.size(); ++i) {
        if (rebalance) {
            const int d = static_cast<int>(pools[i].domain);
            const double share = pools[i].domain == Domain::open_air ? open_share : 1.0 - open_share;
            w[i] = share * w[i] / domain_total[d];
        } else {
            w[i] /= total;
        }
    }
    return w;
}

std::vector<ManifestEntry> sample_epoch(std::span<const DatasetPool> pools, const SamplerConfig& sampler,
                                        std::uint64_t seed) {
    const std::vector<double> probs = dataset_probabilities(pools, sampler);
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> pick_dataset(probs.begin(), probs.end());

    std::vector<ManifestEntry> manifest;
    manifest.reserve(static_cast<std::size_t>(sampler.epoch_size));
    for (int k = 0; k < sampler.epoch_size; ++k) {
        const std::size_t d = pick_dataset(rng);
        const DatasetPool& pool = pools[d];
        const std::size_t r = std::uniform_int_distribution<std::size_t>(0, pool.records.size() - 1)(rng);
        const DetectionRecord& rec = pool.records[r];
        const std::size_t b = std::uniform_int_distribution<std::size_t>(0, rec.boxes.size() - 1)(rng);
        manifest.push_back({pool.id, pool.domain, rec.image, r, b, rec.boxes[b], rng()});
    }
    return manifest;
}

SamplePair make_pair(const cv::Mat& image, const Box& target, std::uint64_t seed, const CropSettings& crop,
                     const AugmentationConfig& aug) {
    const Box bounds{0.0, 0.0, static_cast<double>(image.cols), static_cast<double>(image.rows)};
    const Box clipped = clamp_to(target, bounds.w, bounds.h);
    if (clipped.is_degenerate()) {
        throw Error("target box lies outside the image or is degenerate");
    }
    CropPair cp = crop_pair(image, clipped, crop);
    Augmented a = augment(cp.search, cp.search_box, aug, seed);
    return {cp.template_patch, a.raster, a.box, a.applied_ops, seed};
}

// ---------------------------------------------------------------------------
// Files

std::vector<DetectionRecord> read_detection_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    const std::filesystem::path base = path.parent_path();
    std::vector<DetectionRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const json j = json::parse(line);
            DetectionRecord rec;
            std::filesystem::path img = j.at("image").get<std::string>();
            rec.image = img.is_absolute() ? img : base / img;
            rec.domain = parse_domain(j.at("domain").get<std::string>());
            rec.dataset = j.at("dataset").get<std::string>();
            for (const json& b : j.at("boxes")) {
                if (!b.is_array() || b.size() != 4) {
                    throw Error("box must be [x,y,w,h]");
                }
                const Box box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
                if (!box.is_degenerate()) {
                    rec.boxes.push_back(box);
                }
            }
            records.push_back(std::move(rec));
        } catch (const json::exception& e) {
            throw Error(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

std::vector<DatasetPool> group_by_dataset(std::span<const DetectionRecord> records) {
    std::vector<DatasetPool> pools;
    for (const DetectionRecord& rec : records) {
        if (rec.boxes.empty()) {
            continue;
        }
        auto it = std::find_if(pools.begin(), pools.end(), [&](const DatasetPool& p) { return p.id == rec.dataset; });
        if (it == pools.end()) {
            pools.push_back({rec.dataset, rec.domain, {}});
            it = pools.end() - 1;
        } else if (it->domain != rec.domain) {
            throw Error("dataset \"" + rec.dataset + "\" mixes underwater and open-air records");
        }
        it->records.push_back(rec);
    }
    return pools;
}

cv::Mat load_image(const std::filesystem::path& path) {
    cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (img.empty()) {
        throw Error("cannot read image " + path.string());
    }
    return img;
}

std::string pair_record(std::size_t index, const ManifestEntry& entry, const SamplePair& pair) {
    json ops = json::array();
    for (AugOp op : pair.applied_ops) {
        ops.push_back(std::string(op_name(op)));
    }
    const auto box = [](const Box& b) { return json::array({b.x, b.y, b.w, b.h}); };
    return json{{"index", index},
                {"dataset", entry.dataset},
                {"image", entry.image.string()},
                {"box", box(entry.box)},
                {"search_box", box(pair.search_box)},
                {"applied_ops", ops},
                {"seed", pair.seed}}
        .dump();
}

}  // namespace trackpp::pairgen
