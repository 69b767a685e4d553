#include "trackpp/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>
#include <json.hpp>

#include "trackpp/error.hpp"
#include "trackpp/stream_io.hpp"

namespace trackpp::eval {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_lengths(std::span<const Box> traj, std::span<const Box> gt) {
    if (traj.size() != gt.size()) {
        throw Error("length mismatch: trajectory has " + std::to_string(traj.size()) +
                    " frames, ground truth has " + std::to_string(gt.size()));
    }
    if (traj.empty()) {
        throw Error("empty trajectory");
    }
}

std::vector<double> grid(int count, int denominator) {
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        t[static_cast<std::size_t>(i)] = static_cast<double>(i) / denominator;
    }
    return t;
}

// Mean of the curve as one ratio of integer counts, so hand-computed
// fractions compare exactly.
double curve_mean(std::size_t total_pass, std::size_t frames, std::size_t thresholds) {
    if (frames == 0 || thresholds == 0) {
        return 0.0;
    }
    return static_cast<double>(total_pass) / (static_cast<double>(frames) * static_cast<double>(thresholds));
}

double center_distance(const Box& a, const Box& b) {
    return std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
}

json means_to_json(const MetricMeans& m) {
    return json{{"count", m.count}, {"auc", m.auc}, {"precision", m.precision}, {"norm_precision", m.norm_precision}};
}

double number_or_nan(const json& j) {
    return j.is_null() ? kNaN : j.get<double>();
}

MetricMeans means_from_json(const json& j) {
    return {j.at("count").get<int>(), number_or_nan(j.at("auc")), number_or_nan(j.at("precision")),
            number_or_nan(j.at("norm_precision"))};
}

std::string pct(double v) {
    if (std::isnan(v)) {
        return "-";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
    return buf;
}

std::string signed_pct(double v) {
    if (std::isnan(v)) {
        return "-";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.2f", 100.0 * v);
    return buf;
}

}  // namespace

std::vector<double> overlaps(std::span<const Box> traj, std::span<const Box> gt) {
    check_lengths(traj, gt);
    std::vector<double> out(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out[i] = iou(traj[i], gt[i]);
    }
    return out;
}

EvalCurve success_curve(std::span<const Box> traj, std::span<const Box> gt) {
    const std::vector<double> ov = overlaps(traj, gt);
    EvalCurve c;
    c.thresholds = grid(101, 100);
    c.values.reserve(c.thresholds.size());
    std::size_t total = 0;
    for (double t : c.thresholds) {
        std::size_t pass = 0;
        for (double o : ov) {
            pass += o > t ? 1 : 0;
        }
        total += pass;
        c.values.push_back(static_cast<double>(pass) / static_cast<double>(ov.size()));
    }
    c.summary = curve_mean(total, ov.size(), c.thresholds.size());
    return c;
}

EvalCurve precision_curve(std::span<const Box> traj, std::span<const Box> gt) {
    check_lengths(traj, gt);
    std::vector<double> err(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        err[i] = center_distance(traj[i], gt[i]);
    }
    EvalCurve c;
    c.thresholds = grid(51, 1);
    for (double t : c.thresholds) {
        std::size_t pass = 0;
        for (double e : err) {
            pass += e <= t ? 1 : 0;
        }
        c.values.push_back(static_cast<double>(pass) / static_cast<double>(err.size()));
    }
    c.summary = c.values[static_cast<std::size_t>(kPrecisionReportPx)];
    return c;
}

EvalCurve norm_precision_curve(std::span<const Box> traj, std::span<const Box> gt) {
    check_lengths(traj, gt);
    std::vector<double> err;
    err.reserve(traj.size());
    EvalCurve c;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (gt[i].is_degenerate()) {
            ++c.skipped;
            continue;
        }
        const double dx = (traj[i].cx() - gt[i].cx()) / gt[i].w;
        const double dy = (traj[i].cy() - gt[i].cy()) / gt[i].h;
        err.push_back(std::hypot(dx, dy));
    }
    c.thresholds = grid(101, 200);
    std::size_t total = 0;
    for (double t : c.thresholds) {
        std::size_t pass = 0;
        for (double e : err) {
            pass += e <= t ? 1 : 0;
        }
        total += pass;
        c.values.push_back(err.empty() ? 0.0 : static_cast<double>(pass) / static_cast<double>(err.size()));
    }
    c.summary = curve_mean(total, err.size(), c.thresholds.size());
    return c;
}

SequenceMetrics evaluate_sequence(const std::string& name, std::span<const Box> traj, std::span<const Box> gt) {
    SequenceMetrics m;
    m.name = name;
    m.frames = static_cast<int>(traj.size());
    m.auc = success_curve(traj, gt).summary;
    m.precision = precision_curve(traj, gt).summary;
    const EvalCurve np = norm_precision_curve(traj, gt);
    m.norm_precision = np.summary;
    m.norm_skipped = np.skipped;
    return m;
}

std::vector<SubsetSpec> read_subsets(const std::filesystem::path& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path.string());
    } catch (const YAML::Exception& e) {
        throw Error("cannot read subsets file " + path.string() + ": " + e.what());
    }
    const YAML::Node list = root["subsets"];
    if (!list || !list.IsSequence()) {
        throw Error(path.string() + ": expected a top-level \"subsets\" list");
    }
    std::vector<SubsetSpec> out;
    for (const YAML::Node& n : list) {
        SubsetSpec s;
        s.name = n["name"].as<std::string>("");
        if (s.name.empty()) {
            throw Error(path.string() + ": every subset needs a name");
        }
        for (const YAML::Node& q : n["sequences"]) {
            s.sequences.push_back(q.as<std::string>());
        }
        if (s.sequences.empty()) {
            throw Error(path.string() + ": subset \"" + s.name + "\" is empty");
        }
        out.push_back(std::move(s));
    }
    return out;
}

MetricMeans mean_of(std::span<const SequenceMetrics> rows) {
    MetricMeans m;
    m.count = static_cast<int>(rows.size());
    if (rows.empty()) {
        m.auc = m.precision = m.norm_precision = kNaN;
        return m;
    }
    for (const SequenceMetrics& r : rows) {
        m.auc += r.auc;
        m.precision += r.precision;
        m.norm_precision += r.norm_precision;
    }
    const double n = static_cast<double>(rows.size());
    m.auc /= n;
    m.precision /= n;
    m.norm_precision /= n;
    return m;
}

Report attribute_report(std::span<const SequenceMetrics> results, std::span<const SubsetSpec> subsets,
                        const std::string& label) {
    Report report;
    report.label = label;
    report.sequences.assign(results.begin(), results.end());
    report.overall = mean_of(results);

    std::set<std::string> known;
    for (const SequenceMetrics& r : results) {
        known.insert(r.name);
    }
    std::string missing;
    for (const SubsetSpec& s : subsets) {
        for (const std::string& q : s.sequences) {
            if (!known.contains(q)) {
                missing += (missing.empty() ? "" : ", ") + q;
            }
        }
    }
    if (!missing.empty()) {
        throw Error("unknown sequence(s) in subsets: " + missing);
    }

    for (const SubsetSpec& s : subsets) {
        const std::set<std::string> members(s.sequences.begin(), s.sequences.end());
        std::vector<SequenceMetrics> in;
        std::vector<SequenceMetrics> out;
        for (const SequenceMetrics& r : results) {
            (members.contains(r.name) ? in : out).push_back(r);
        }
        report.subsets.push_back({s.name, mean_of(in), mean_of(out)});
    }
    return report;
}

void write_report(const std::filesystem::path& path, const Report& report) {
    json seqs = json::array();
    for (const SequenceMetrics& s : report.sequences) {
        seqs.push_back(json{{"name", s.name},
                            {"frames", s.frames},
                            {"auc", s.auc},
                            {"precision", s.precision},
                            {"norm_precision", s.norm_precision},
                            {"norm_skipped", s.norm_skipped}});
    }
    json subs = json::array();
    for (const SubsetSummary& s : report.subsets) {
        subs.push_back(json{{"name", s.name}, {"subset", means_to_json(s.subset)},
                            {"complement", means_to_json(s.complement)}});
    }
    const json doc{
        {"label", report.label},
        {"conventions",
         {{"protocol", "one-pass evaluation, frame 0 included"},
          {"success", "fraction of frames with IoU > t, t = 0.00..1.00 step 0.01; summary = mean (AUC)"},
          {"precision", "fraction of frames with center error <= t px, t = 0..50; summary = value at 20 px"},
          {"norm_precision",
           "fraction of frames with ||(dcx/w_gt, dcy/h_gt)|| <= t, t = 0..0.5 step 0.005; summary = mean"}}},
        {"overall", means_to_json(report.overall)},
        {"subsets", subs},
        {"sequences", seqs}};
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

Report read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    try {
        const json doc = json::parse(in);
        Report r;
        r.label = doc.value("label", path.stem().string());
        if (r.label.empty()) {
            r.label = path.stem().string();
        }
        r.overall = means_from_json(doc.at("overall"));
        for (const json& s : doc.at("sequences")) {
            r.sequences.push_back({s.at("name").get<std::string>(), s.at("frames").get<int>(),
                                   s.at("auc").get<double>(), s.at("precision").get<double>(),
                                   s.at("norm_precision").get<double>(), s.value("norm_skipped", 0)});
        }
        for (const json& s : doc.at("subsets")) {
            r.subsets.push_back({s.at("name").get<std::string>(), means_from_json(s.at("subset")),
                                 means_from_json(s.at("complement"))});
        }
        return r;
    } catch (const json::exception& e) {
        throw Error(path.string() + ": malformed report: " + e.what());
    }
}

void write_report_csv(const std::filesystem::path& path, const Report& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << "sequence,frames,auc,precision,norm_precision\n";
    for (const SequenceMetrics& s : report.sequences) {
        out << s.name << ',' << s.frames << ',' << io::format_number(s.auc) << ','
            << io::format_number(s.precision) << ',' << io::format_number(s.norm_precision) << '\n';
    }
}

void write_curve_csv(const std::filesystem::path& path, const EvalCurve& curve) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << "threshold,value\n";
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        out << io::format_number(curve.thresholds[i]) << ',' << io::format_number(curve.values[i]) << '\n';
    }
}

std::string comparison_table(std::span<const Report> reports) {
    std::ostringstream out;
    if (reports.empty()) {
        return "";
    }
    const auto section = [&](const std::string& title, auto&& pick) {
        out << "## " << title << "\n";
        out << "| tracker | AUC | P | P-Norm | dAUC | dP | dP-Norm |\n";
        out << "|---|---|---|---|---|---|---|\n";
        const MetricMeans base = pick(reports.front());
        for (const Report& r : reports) {
            const MetricMeans m = pick(r);
            out << "| " << r.label << " | " << pct(m.auc) << " | " << pct(m.precision) << " | "
                << pct(m.norm_precision) << " | " << signed_pct(m.auc - base.auc) << " | "
                << signed_pct(m.precision - base.precision) << " | "
                << signed_pct(m.norm_precision - base.norm_precision) << " |\n";
        }
        out << "\n";
    };

    section("overall", [](const Report& r) { return r.overall; });
    for (const SubsetSummary& s : reports.front().subsets) {
        const auto find = [&](const Report& r, bool complement) {
            for (const SubsetSummary& t : r.subsets) {
                if (t.name == s.name) {
                    return complement ? t.complement : t.subset;
                }
            }
            return MetricMeans{0, kNaN, kNaN, kNaN};
        };
        section(s.name, [&](const Report& r) { return find(r, false); });
        section(s.name + " (complement)", [&](const Report& r) { return find(r, true); });
    }
    return out.str();
}

}  // namespace trackpp::eval
