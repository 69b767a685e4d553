#include "trackpp/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include "trackpp/batch.hpp"
#include "trackpp/config.hpp"
#include "trackpp/error.hpp"
#include "trackpp/eval.hpp"
#include "trackpp/mbpp.hpp"
#include "trackpp/pairgen.hpp"
#include "trackpp/simulator.hpp"
#include "trackpp/stream_io.hpp"

namespace trackpp::cli {

namespace fs = std::filesystem;

namespace {

std::shared_ptr<spdlog::logger> make_logger() {
    auto logger = spdlog::get("trackpp");
    if (!logger) {
        logger = spdlog::stderr_color_mt("trackpp");
    }
    const char* env = std::getenv("TRACKPP_LOG");
    logger->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    return logger;
}

// Options shared by every subcommand that reads a RunConfig.
struct ConfigOptions {
    std::string path;
    std::vector<std::string> overrides;
    bool print = false;

    void attach(CLI::App* app) {
        app->add_option("--config", path, "YAML config file (see docs/config.md)");
        app->add_option("--set", overrides, "Override one key: section.key=value")->take_all();
        app->add_flag("--print-config", print, "Print the fully resolved config and exit");
    }

    config::RunConfig resolve() const {
        config::RunConfig c = path.empty() ? config::RunConfig{} : config::load(path);
        for (const std::string& o : overrides) {
            config::apply_override(c, o);
        }
        c.validate();
        return c;
    }
};

void require_exists(const fs::path& p, const char* what) {
    if (!fs::exists(p)) {
        throw Error(std::string(what) + " not found: " + p.string());
    }
}

std::vector<fs::path> files_with_extension(const fs::path& dir, const std::string& ext) {
    std::vector<fs::path> out;
    for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ext) {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    ConfigOptions cfg;
    std::string out;
    int batch = 0;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, spdlog::logger& log) {
    const config::RunConfig c = a.cfg.resolve();
    if (a.cfg.print) {
        out << config::to_yaml(c);
        return kExitOk;
    }
    if (a.out.empty()) {
        throw Error("simulate: --out is required", ErrorKind::usage);
    }
    std::vector<sim::SceneConfig> scenes;
    if (a.batch <= 0) {
        scenes.push_back(c.scene);
    } else {
        for (int i = 0; i < a.batch; ++i) {
            sim::SceneConfig s = c.scene;
            s.seed = c.scene.seed + static_cast<std::uint64_t>(i);
            char suffix[16];
            std::snprintf(suffix, sizeof(suffix), "_%03d", i);
            s.name = c.scene.name + suffix;
            scenes.push_back(std::move(s));
        }
    }
    const std::vector<sim::SyntheticSequence> seqs = batch::simulate(scenes, batch::Execution::parallel);
    const fs::path root(a.out);
    for (const sim::SyntheticSequence& s : seqs) {
        io::write_stream(root / "streams" / (s.config.name + ".jsonl"), s.candidate_stream());
        io::write_trajectory(root / "gt" / (s.config.name + ".txt"), s.ground_truth);
    }
    log.info("simulate: wrote {} sequence(s) to {}", seqs.size(), root.string());
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct TrackArgs {
    ConfigOptions cfg;
    std::string stream;
    std::string mode = "mbpp";
    std::string out;
    std::string diagnostics;
};

nlohmann::json diagnostics_json(int frame, const mbpp::StepDiagnostics& d) {
    const Box& e = d.estimation;
    static constexpr const char* kSource[] = {"max_response", "candidate", "fallback_max_response",
                                              "fallback_estimation"};
    return {{"frame", frame},
            {"estimation", {e.x, e.y, e.w, e.h}},
            {"max_iou", d.max_iou},
            {"drift_detected", d.drift_detected},
            {"chosen_index", d.chosen_index},
            {"source", kSource[static_cast<int>(d.source)]},
            {"scores", d.scores}};
}

void track_one(const fs::path& stream_path, const fs::path& out_path, const std::optional<fs::path>& diag_path,
               bool use_mbpp, const config::RunConfig& c) {
    const io::CandidateStream stream = io::read_stream(stream_path, c.candidates);
    std::vector<Box> traj;
    if (use_mbpp) {
        const mbpp::SequenceRun run = mbpp::run_sequence(stream.frames, stream.header.init_box, c.mbpp, c.filter);
        traj = run.trajectory;
        if (diag_path) {
            if (diag_path->has_parent_path()) {
                fs::create_directories(diag_path->parent_path());
            }
            std::ofstream d(*diag_path, std::ios::trunc);
            for (std::size_t i = 0; i < run.diagnostics.size(); ++i) {
                d << diagnostics_json(stream.frames[i].frame, run.diagnostics[i]).dump() << '\n';
            }
        }
    } else {
        for (std::size_t i = 0; i < stream.frames.size(); ++i) {
            if (stream.frames[i].frame != static_cast<int>(i) + 1) {
                throw Error("non-contiguous frame index: expected " + std::to_string(i + 1) + ", got " +
                            std::to_string(stream.frames[i].frame));
            }
        }
        traj.push_back(stream.header.init_box);
        const std::vector<Box> max_boxes = mbpp::dbpp_baseline(stream.frames);
        traj.insert(traj.end(), max_boxes.begin(), max_boxes.end());
    }
    io::write_trajectory(out_path, traj);
}

int cmd_track(const TrackArgs& a, std::ostream& out, spdlog::logger& log) {
    const config::RunConfig c = a.cfg.resolve();
    if (a.cfg.print) {
        out << config::to_yaml(c);
        return kExitOk;
    }
    if (a.stream.empty() || a.out.empty()) {
        throw Error("track: --stream and --out are required", ErrorKind::usage);
    }
    if (a.mode != "mbpp" && a.mode != "dbpp") {
        throw Error("track: --mode must be mbpp or dbpp", ErrorKind::usage);
    }
    const bool use_mbpp = a.mode == "mbpp";
    const fs::path in(a.stream);
    require_exists(in, "stream");

    if (fs::is_directory(in)) {
        const std::vector<fs::path> streams = files_with_extension(in, ".jsonl");
        fs::create_directories(a.out);
        std::vector<std::string> errors(streams.size());
        std::exception_ptr first;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(streams.size()); ++i) {
            const fs::path& s = streams[static_cast<std::size_t>(i)];
            const std::string stem = s.stem().string();
            std::optional<fs::path> diag;
            if (!a.diagnostics.empty()) {
                diag = fs::path(a.diagnostics) / (stem + ".jsonl");
            }
            try {
                track_one(s, fs::path(a.out) / (stem + ".txt"), diag, use_mbpp, c);
            } catch (...) {
#pragma omp critical(trackpp_track_error)
                if (!first) {
                    first = std::current_exception();
                }
            }
        }
        if (first) {
            std::rethrow_exception(first);
        }
        log.info("track: {} stream(s) -> {}", streams.size(), a.out);
    } else {
        std::optional<fs::path> diag;
        if (!a.diagnostics.empty()) {
            diag = fs::path(a.diagnostics);
        }
        track_one(in, a.out, diag, use_mbpp, c);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string traj;
    std::string gt;
    std::string subsets;
    std::string out;
    std::string label;
    std::string csv;
    std::string curves;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, spdlog::logger& log) {
    if (a.traj.empty() || a.gt.empty() || a.out.empty()) {
        throw Error("eval: --traj, --gt and --out are required", ErrorKind::usage);
    }
    const fs::path traj(a.traj);
    const fs::path gt(a.gt);
    require_exists(traj, "trajectory");
    require_exists(gt, "ground truth");

    std::vector<batch::SequenceInput> inputs;
    if (fs::is_directory(traj)) {
        if (!fs::is_directory(gt)) {
            throw Error("eval: --traj is a directory, so --gt must be one too", ErrorKind::usage);
        }
        for (const fs::path& t : files_with_extension(traj, ".txt")) {
            const fs::path g = gt / t.filename();
            require_exists(g, "ground truth");
            inputs.push_back({t.stem().string(), io::read_trajectory(t), io::read_trajectory(g)});
        }
        if (inputs.empty()) {
            throw Error("eval: no .txt trajectories in " + traj.string());
        }
    } else {
        inputs.push_back({traj.stem().string(), io::read_trajectory(traj), io::read_trajectory(gt)});
    }

    const std::vector<eval::SequenceMetrics> metrics = batch::evaluate(inputs, batch::Execution::parallel);
    std::vector<eval::SubsetSpec> subsets;
    if (!a.subsets.empty()) {
        subsets = eval::read_subsets(a.subsets);
    }
    const std::string label = a.label.empty() ? traj.stem().string() : a.label;
    const eval::Report report = eval::attribute_report(metrics, subsets, label);
    eval::write_report(a.out, report);
    if (!a.csv.empty()) {
        eval::write_report_csv(a.csv, report);
    }
    if (!a.curves.empty()) {
        fs::create_directories(a.curves);
        for (const batch::SequenceInput& in : inputs) {
            const fs::path dir(a.curves);
            eval::write_curve_csv(dir / (in.name + ".success.csv"), eval::success_curve(in.traj, in.gt));
            eval::write_curve_csv(dir / (in.name + ".precision.csv"), eval::precision_curve(in.traj, in.gt));
            eval::write_curve_csv(dir / (in.name + ".norm_precision.csv"),
                                  eval::norm_precision_curve(in.traj, in.gt));
        }
    }
    char line[160];
    std::snprintf(line, sizeof(line), "%s: %zu sequence(s)  AUC %.2f  P %.2f  P-Norm %.2f\n", label.c_str(),
                  metrics.size(), 100.0 * report.overall.auc, 100.0 * report.overall.precision,
                  100.0 * report.overall.norm_precision);
    out << line;
    log.info("eval: report written to {}", a.out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct PairgenArgs {
    ConfigOptions cfg;
    std::string manifest;
    std::string out;
    std::optional<int> epoch_size;
    std::uint64_t seed = 0;
};

int cmd_pairgen(const PairgenArgs& a, std::ostream& out, spdlog::logger& log) {
    config::RunConfig c = a.cfg.resolve();
    if (a.epoch_size) {
        c.sampler.epoch_size = *a.epoch_size;
        c.sampler.validate();
    }
    if (a.cfg.print) {
        out << config::to_yaml(c);
        return kExitOk;
    }
    if (a.manifest.empty() || a.out.empty()) {
        throw Error("pairgen: --manifest and --out are required", ErrorKind::usage);
    }
    require_exists(a.manifest, "manifest");

    const std::vector<pairgen::DetectionRecord> records = pairgen::read_detection_manifest(a.manifest);
    const std::vector<pairgen::DatasetPool> pools = pairgen::group_by_dataset(records);
    const std::vector<pairgen::ManifestEntry> entries = pairgen::sample_epoch(pools, c.sampler, a.seed);
    const batch::ImageCache images = batch::load_images(entries);
    const std::vector<pairgen::SamplePair> pairs =
        batch::generate_pairs(entries, images, c.crop, c.augmentation, batch::Execution::parallel);

    const fs::path dir(a.out);
    fs::create_directories(dir);
    std::ofstream manifest_out(dir / "pairs.jsonl", std::ios::trunc);
    if (!manifest_out) {
        throw Error("cannot write " + (dir / "pairs.jsonl").string());
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::string idx = std::to_string(i);
        if (!cv::imwrite((dir / (idx + "_template.png")).string(), pairs[i].template_patch) ||
            !cv::imwrite((dir / (idx + "_search.png")).string(), pairs[i].search)) {
            throw Error("cannot write pair images into " + dir.string());
        }
        manifest_out << pairgen::pair_record(i, entries[i], pairs[i]) << '\n';
    }
    out << "pairgen: " << pairs.size() << " pair(s) written to " << dir.string() << "\n";
    log.info("pairgen: {} dataset(s), {} record(s)", pools.size(), records.size());
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
    if (a.inputs.empty()) {
        throw Error("report: at least one --inputs file is required", ErrorKind::usage);
    }
    std::vector<eval::Report> reports;
    for (const std::string& p : a.inputs) {
        require_exists(p, "report");
        reports.push_back(eval::read_report(p));
    }
    const std::string table = eval::comparison_table(reports);
    out << table;
    if (!a.out.empty()) {
        std::ofstream f(a.out, std::ios::trunc);
        if (!f) {
            throw Error("cannot write " + a.out);
        }
        f << table;
    }
    return kExitOk;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

int fail(std::ostream& err, ErrorKind kind, const std::string& message) {
    err << "trackpp: error (" << (kind == ErrorKind::usage ? "usage" : "data") << "): " << one_line(message)
        << std::endl;
    return kind == ErrorKind::usage ? kExitUsage : kExitData;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tracking post-processing toolkit: simulate, track, eval, pairgen, report"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    CLI::App* simulate = app.add_subcommand("simulate", "Generate synthetic candidate streams and ground truth");
    sim_args.cfg.attach(simulate);
    simulate->add_option("--out", sim_args.out, "Output directory (streams/ and gt/)");
    simulate->add_option("--batch", sim_args.batch, "Number of sequences, seeds seed..seed+K-1");

    TrackArgs track_args;
    CLI::App* track = app.add_subcommand("track", "Run MBPP or the DBPP baseline over candidate streams");
    track_args.cfg.attach(track);
    track->add_option("--stream", track_args.stream, "Candidate stream file or directory of .jsonl streams");
    track->add_option("--mode", track_args.mode, "mbpp or dbpp")->check(CLI::IsMember({"mbpp", "dbpp"}));
    track->add_option("--out", track_args.out, "Output trajectory file (or directory)");
    track->add_option("--diagnostics", track_args.diagnostics, "Per-frame MBPP diagnostics (JSON lines)");

    EvalArgs eval_args;
    CLI::App* evaluate = app.add_subcommand("eval", "One-pass evaluation of trajectories against ground truth");
    evaluate->add_option("--traj", eval_args.traj, "Trajectory file or directory");
    evaluate->add_option("--gt", eval_args.gt, "Ground-truth file or directory");
    evaluate->add_option("--subsets", eval_args.subsets, "Subset definitions (YAML)");
    evaluate->add_option("--out", eval_args.out, "Report path (JSON)");
    evaluate->add_option("--label", eval_args.label, "Tracker label used in comparison tables");
    evaluate->add_option("--csv", eval_args.csv, "Also write per-sequence rows as CSV");
    evaluate->add_option("--curves", eval_args.curves, "Directory for per-sequence curve CSVs");

    PairgenArgs pg_args;
    CLI::App* pairgen_cmd = app.add_subcommand("pairgen", "Build template/search training pairs from detection images");
    pg_args.cfg.attach(pairgen_cmd);
    pairgen_cmd->add_option("--manifest", pg_args.manifest, "Detection manifest (JSON lines)");
    pairgen_cmd->add_option("--out", pg_args.out, "Output directory");
    pairgen_cmd->add_option("--epoch-size", pg_args.epoch_size, "Number of pairs to sample");
    pairgen_cmd->add_option("--seed", pg_args.seed, "Sampler seed");

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "Compare eval reports side by side");
    report->add_option("--inputs", report_args.inputs, "Report files; the first is the baseline")->take_all();
    report->add_option("--out", report_args.out, "Also write the table to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        return fail(err, ErrorKind::usage, e.what());
    }

    const auto logger = make_logger();
    try {
        if (*simulate) {
            return cmd_simulate(sim_args, out, *logger);
        }
        if (*track) {
            return cmd_track(track_args, out, *logger);
        }
        if (*evaluate) {
            return cmd_eval(eval_args, out, *logger);
        }
        if (*pairgen_cmd) {
            return cmd_pairgen(pg_args, out, *logger);
        }
        if (*report) {
            return cmd_report(report_args, out);
        }
    } catch (const Error& e) {
        return fail(err, e.kind(), e.what());
    } catch (const YAML::Exception& e) {
        return fail(err, ErrorKind::usage, e.what());
    } catch (const std::exception& e) {
        return fail(err, ErrorKind::data, e.what());
    }
    return fail(err, ErrorKind::usage, "no subcommand given");
}

}  // namespace trackpp::cli
