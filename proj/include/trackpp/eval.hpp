#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "trackpp/box.hpp"

namespace trackpp::eval {

/// One-pass evaluation conventions used throughout:
///   success:        value(t) = fraction of frames with IoU > t, t = 0.00..1.00 step 0.01;
///                   summary = mean of the 101 values (AUC)
///   precision:      value(t) = fraction of frames with center error <= t px, t = 0..50;
///                   summary = value at 20 px
///   norm precision: error = ||(dcx / w_gt, dcy / h_gt)||, value(t) = fraction <= t,
///                   t = 0.000..0.500 step 0.005; summary = mean of the 101 values
/// Frame 0 (the initialization frame) is included.
struct EvalCurve {
    std::vector<double> thresholds;
    std::vector<double> values;
    double summary = 0.0;
    int skipped = 0;  ///< frames excluded from the curve (degenerate ground truth)
};

inline constexpr double kPrecisionReportPx = 20.0;

EvalCurve success_curve(std::span<const Box> traj, std::span<const Box> gt);
EvalCurve precision_curve(std::span<const Box> traj, std::span<const Box> gt);
EvalCurve norm_precision_curve(std::span<const Box> traj, std::span<const Box> gt);

struct SequenceMetrics {
    std::string name;
    int frames = 0;
    double auc = 0.0;
    double precision = 0.0;
    double norm_precision = 0.0;
    int norm_skipped = 0;

    friend bool operator==(const SequenceMetrics&, const SequenceMetrics&) = default;
};

/// Throws Error naming both lengths when they differ.
SequenceMetrics evaluate_sequence(const std::string& name, std::span<const Box> traj, std::span<const Box> gt);

/// Per-frame overlaps, for diagnostics.
std::vector<double> overlaps(std::span<const Box> traj, std::span<const Box> gt);

struct SubsetSpec {
    std::string name;
    std::vector<std::string> sequences;
};

/// YAML document: `subsets: [{name: ..., sequences: [...]}, ...]`.
std::vector<SubsetSpec> read_subsets(const std::filesystem::path& path);

/// Means over sequences. count == 0 leaves the means NaN.
struct MetricMeans {
    int count = 0;
    double auc = 0.0;
    double precision = 0.0;
    double norm_precision = 0.0;
};

MetricMeans mean_of(std::span<const SequenceMetrics> rows);

struct SubsetSummary {
    std::string name;
    MetricMeans subset;
    MetricMeans complement;
};

struct Report {
    std::string label;
    std::vector<SequenceMetrics> sequences;
    MetricMeans overall;
    std::vector<SubsetSummary> subsets;
};

/// Overall, per-subset and complement means. Throws Error listing every subset
/// sequence missing from the results.
Report attribute_report(std::span<const SequenceMetrics> results, std::span<const SubsetSpec> subsets,
                        const std::string& label = "");

void write_report(const std::filesystem::path& path, const Report& report);
Report read_report(const std::filesystem::path& path);
void write_report_csv(const std::filesystem::path& path, const Report& report);
void write_curve_csv(const std::filesystem::path& path, const EvalCurve& curve);

/// Side-by-side table of overall and subset means in percentage points, with
/// delta columns against the first report.
std::string comparison_table(std::span<const Report> reports);

}  // namespace trackpp::eval
