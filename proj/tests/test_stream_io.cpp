#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "trackpp/error.hpp"
#include "trackpp/stream_io.hpp"

using namespace trackpp;
using namespace trackpp::io;

namespace {

CandidateStream random_stream(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-20, 600), side(0.5, 90), score(0, 1);
    CandidateStream s;
    s.header = {"seq_" + std::to_string(seed), {12.25, 40.5, 33.3, 17.0}, 640, 480};
    for (int k = 1; k <= 25; ++k) {
        mbpp::FrameObservation o;
        o.frame = k;
        const int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            o.candidates.push_back({{pos(rng), pos(rng), side(rng), side(rng)}, score(rng)});
        }
        o.max = o.candidates.front();
        s.frames.push_back(o);
    }
    return s;
}

std::string header_line() {
    return R"({"sequence":"s","init_box":[1,2,3,4],"width":100,"height":80})";
}

std::string read_error(const std::string& text) {
    std::istringstream in(text);
    try {
        read_stream(in);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Stream, RoundTripsBitExactly) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const CandidateStream s = random_stream(seed);
        std::ostringstream out;
        write_stream(out, s);
        std::istringstream in(out.str());
        const CandidateStream back = read_stream(in);
        EXPECT_EQ(back.header, s.header);
        EXPECT_EQ(back.frames, s.frames);

        std::ostringstream again;
        write_stream(again, back);
        EXPECT_EQ(again.str(), out.str());
    }
}

TEST(Stream, ResponseRecordsAreExtracted) {
    candidates::ResponseFrame rf;
    rf.grid_size = 4;
    for (int i = 0; i < 16; ++i) {
        rf.entries.push_back({i, i / 16.0, {double(i) * 20, 0, 15, 15}});
    }
    std::istringstream in(header_line() + "\n" + response_record(1, rf) + "\n");
    const CandidateStream s = read_stream(in, {5, 0.5});
    ASSERT_EQ(s.frames.size(), 1u);
    const auto& o = s.frames[0];
    EXPECT_EQ(o.frame, 1);
    EXPECT_EQ(o.candidates.size(), 5u);
    EXPECT_EQ(o.max, o.candidates.front());
    EXPECT_EQ(o.max.box, rf.entries[15].box);
}

TEST(Stream, ErrorsNameTheLine) {
    EXPECT_NE(read_error(header_line() + "\n{\"frame\":1,\"max\":{\"box\":[0,0,1,1],\"score\":0.5},"
                                         "\"candidates\":[]}")
                  .find("line 2: no candidates"),
              std::string::npos);
    EXPECT_NE(read_error(header_line() + "\nnot json").find("line 2"), std::string::npos);
    EXPECT_NE(read_error(header_line() + "\n{\"frame\":1,\"max\":{\"box\":[0,0,1,1],\"score\":0.5},"
                                         "\"candidates\":[{\"box\":[0,0,2,2],\"score\":0.5}]}")
                  .find("first candidate"),
              std::string::npos);
    EXPECT_NE(read_error(header_line() + "\n{\"frame\":1,\"max\":{\"box\":[0,0,1,1],\"score\":1.5},"
                                         "\"candidates\":[{\"box\":[0,0,1,1],\"score\":1.5}]}")
                  .find("score outside"),
              std::string::npos);
    EXPECT_NE(read_error(R"({"sequence":"s","init_box":[1,2,0,4],"width":100,"height":80})")
                  .find("line 1: degenerate box"),
              std::string::npos);
    EXPECT_NE(read_error("").find("missing header"), std::string::npos);
    EXPECT_NE(read_error(R"({"sequence":"s","width":100,"height":80})").find("init_box"), std::string::npos);
}

TEST(Trajectory, RoundTripsAndAcceptsSeparators) {
    const std::vector<Box> boxes = {{0.1, 0.2, 10, 20}, {1e-7, 123456.789, 0.3, 1.0 / 3.0}};
    std::ostringstream out;
    write_trajectory(out, boxes);
    std::istringstream in(out.str());
    EXPECT_EQ(read_trajectory(in), boxes);

    std::istringstream mixed("1\t2\t3\t4\n\n5 6 7 8\r\n9,10, 11 ,12\n");
    EXPECT_EQ(read_trajectory(mixed), (std::vector<Box>{{1, 2, 3, 4}, {5, 6, 7, 8}, {9, 10, 11, 12}}));

    std::istringstream bad("1,2,3\n");
    EXPECT_THROW(read_trajectory(bad), Error);
    std::istringstream extra("1,2,3,4,5\n");
    EXPECT_THROW(read_trajectory(extra), Error);
}

TEST(Trajectory, FormatNumberIsShortestRoundTrip) {
    EXPECT_EQ(format_number(10.0), "10");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(-2.5), "-2.5");
    const double third = 1.0 / 3.0;
    EXPECT_EQ(std::stod(format_number(third)), third);
}
