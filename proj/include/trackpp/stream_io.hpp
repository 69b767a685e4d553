#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "trackpp/box.hpp"
#include "trackpp/candidates.hpp"
#include "trackpp/mbpp.hpp"

namespace trackpp::io {

struct StreamHeader {
    std::string sequence;
    Box init_box;
    int width = 0;
    int height = 0;

    friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

/// Line-delimited candidate stream: a header record followed by one record per frame.
struct CandidateStream {
    StreamHeader header;
    std::vector<mbpp::FrameObservation> frames;
};

/// Settings applied to frame records that carry a raw response map instead of
/// a pre-extracted candidate list.
struct ResponseOptions {
    int n = candidates::kDefaultCount;
    double nms_threshold = candidates::kDefaultNmsThreshold;
};

CandidateStream read_stream(std::istream& in, const ResponseOptions& options = {});
CandidateStream read_stream(const std::filesystem::path& path, const ResponseOptions& options = {});
void write_stream(std::ostream& out, const CandidateStream& stream);
void write_stream(const std::filesystem::path& path, const CandidateStream& stream);

/// Serializes a frame record carrying a full response map.
std::string response_record(int frame, const candidates::ResponseFrame& response);

/// OTB-style trajectory: one "x,y,w,h" line per frame. Reading also accepts
/// tab- or whitespace-separated values.
std::vector<Box> read_trajectory(std::istream& in);
std::vector<Box> read_trajectory(const std::filesystem::path& path);
void write_trajectory(std::ostream& out, std::span<const Box> boxes);
void write_trajectory(const std::filesystem::path& path, std::span<const Box> boxes);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

}  // namespace trackpp::io
