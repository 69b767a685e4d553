#include "trackpp/stream_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trackpp/error.hpp"

namespace trackpp::io {

using nlohmann::json;

namespace {

std::string at_line(std::size_t line) {
    return "stream line " + std::to_string(line) + ": ";
}

Box box_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) {
        throw Error("box must be an array [x,y,w,h]");
    }
    for (const json& v : j) {
        if (!v.is_number()) {
            throw Error("box entries must be numbers");
        }
    }
    Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    if (b.w < 0.0 || b.h < 0.0) {
        throw Error("box width and height must be non-negative");
    }
    return b;
}

json box_to_json(const Box& b) {
    return json::array({b.x, b.y, b.w, b.h});
}

double score_from_json(const json& j) {
    if (!j.is_number()) {
        throw Error("score must be a number");
    }
    const double s = j.get<double>();
    if (!(s >= 0.0 && s <= 1.0)) {
        throw Error("score outside [0, 1]");
    }
    return s;
}

ScoredBox scored_from_json(const json& j) {
    if (!j.is_object() || !j.contains("box") || !j.contains("score")) {
        throw Error("scored box must be an object with \"box\" and \"score\"");
    }
    return {box_from_json(j.at("box")), score_from_json(j.at("score"))};
}

json scored_to_json(const ScoredBox& s) {
    return json{{"box", box_to_json(s.box)}, {"score", s.score}};
}

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) {
        throw Error(std::string("missing key \"") + key + "\"");
    }
    return j.at(key);
}

StreamHeader header_from_json(const json& j) {
    StreamHeader h;
    const json& seq = require(j, "sequence");
    if (!seq.is_string()) {
        throw Error("\"sequence\" must be a string");
    }
    h.sequence = seq.get<std::string>();
    h.init_box = box_from_json(require(j, "init_box"));
    if (h.init_box.is_degenerate()) {
        throw Error("degenerate box");
    }
    const json& w = require(j, "width");
    const json& ht = require(j, "height");
    if (!w.is_number_integer() || !ht.is_number_integer()) {
        throw Error("\"width\" and \"height\" must be integers");
    }
    h.width = w.get<int>();
    h.height = ht.get<int>();
    return h;
}

candidates::ResponseFrame response_from_json(const json& j) {
    candidates::ResponseFrame rf;
    rf.grid_size = require(j, "grid_size").get<int>();
    const json& entries = require(j, "entries");
    if (!entries.is_array()) {
        throw Error("\"entries\" must be an array");
    }
    rf.entries.reserve(entries.size());
    for (const json& e : entries) {
        rf.entries.push_back({require(e, "patch").get<int>(), score_from_json(require(e, "score")),
                              box_from_json(require(e, "box"))});
    }
    return rf;
}

mbpp::FrameObservation frame_from_json(const json& j, const ResponseOptions& options) {
    mbpp::FrameObservation obs;
    const json& frame = require(j, "frame");
    if (!frame.is_number_integer()) {
        throw Error("\"frame\" must be an integer");
    }
    obs.frame = frame.get<int>();

    if (j.contains("response")) {
        const candidates::CandidateSet set =
            candidates::extract(response_from_json(j.at("response")), options.n, options.nms_threshold);
        obs.candidates = set.items;
        obs.max = obs.candidates.front();
        return obs;
    }

    obs.max = scored_from_json(require(j, "max"));
    const json& cands = require(j, "candidates");
    if (!cands.is_array()) {
        throw Error("\"candidates\" must be an array");
    }
    obs.candidates.reserve(cands.size());
    for (const json& c : cands) {
        obs.candidates.push_back(scored_from_json(c));
    }
    if (obs.candidates.empty()) {
        throw Error("no candidates");
    }
    if (!(obs.candidates.front() == obs.max)) {
        throw Error("first candidate must equal the max-response box");
    }
    return obs;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    return out;
}

}  // namespace

CandidateStream read_stream(std::istream& in, const ResponseOptions& options) {
    CandidateStream stream;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const json j = json::parse(line);
            if (!j.is_object()) {
                throw Error("record must be an object");
            }
            if (!have_header) {
                stream.header = header_from_json(j);
                have_header = true;
            } else {
                stream.frames.push_back(frame_from_json(j, options));
            }
        } catch (const json::exception& e) {
            throw Error(at_line(line_no) + e.what());
        } catch (const Error& e) {
            throw Error(at_line(line_no) + e.what(), e.kind());
        }
    }
    if (!have_header) {
        throw Error("candidate stream is empty (missing header)");
    }
    return stream;
}

CandidateStream read_stream(const std::filesystem::path& path, const ResponseOptions& options) {
    std::ifstream in = open_in(path);
    return read_stream(in, options);
}

void write_stream(std::ostream& out, const CandidateStream& stream) {
    const StreamHeader& h = stream.header;
    out << json{{"sequence", h.sequence},
                {"init_box", box_to_json(h.init_box)},
                {"width", h.width},
                {"height", h.height}}
               .dump()
        << '\n';
    for (const mbpp::FrameObservation& obs : stream.frames) {
        json cands = json::array();
        for (const ScoredBox& c : obs.candidates) {
            cands.push_back(scored_to_json(c));
        }
        out << json{{"frame", obs.frame}, {"max", scored_to_json(obs.max)}, {"candidates", cands}}.dump()
            << '\n';
    }
}

void write_stream(const std::filesystem::path& path, const CandidateStream& stream) {
    std::ofstream out = open_out(path);
    write_stream(out, stream);
}

std::string response_record(int frame, const candidates::ResponseFrame& response) {
    json entries = json::array();
    for (const candidates::ResponseEntry& e : response.entries) {
        entries.push_back(json{{"patch", e.patch_index}, {"score", e.score}, {"box", box_to_json(e.box)}});
    }
    return json{{"frame", frame}, {"response", {{"grid_size", response.grid_size}, {"entries", entries}}}}
        .dump();
}

std::vector<Box> read_trajectory(std::istream& in) {
    std::vector<Box> boxes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        for (char& c : line) {
            if (c == ',' || c == '\t' || c == '\r') {
                c = ' ';
            }
        }
        if (line.find_first_not_of(' ') == std::string::npos) {
            continue;
        }
        std::istringstream fields(line);
        Box b;
        std::string rest;
        if (!(fields >> b.x >> b.y >> b.w >> b.h) || (fields >> rest)) {
            throw Error("trajectory line " + std::to_string(line_no) + ": expected 4 numbers x,y,w,h");
        }
        boxes.push_back(b);
    }
    return boxes;
}

std::vector<Box> read_trajectory(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    try {
        return read_trajectory(in);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void write_trajectory(std::ostream& out, std::span<const Box> boxes) {
    for (const Box& b : boxes) {
        out << format_number(b.x) << ',' << format_number(b.y) << ',' << format_number(b.w) << ','
            << format_number(b.h) << '\n';
    }
}

void write_trajectory(const std::filesystem::path& path, std::span<const Box> boxes) {
    std::ofstream out = open_out(path);
    write_trajectory(out, boxes);
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

}  // namespace trackpp::io
