#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "trackpp/error.hpp"
#include "trackpp/eval.hpp"

using namespace trackpp;
using namespace trackpp::eval;

namespace {

// Five frames with hand-checked per-frame values:
//   overlap          1, 1/3, 0.5, 0,   0.5
//   center error px  0, 5,   2.5, 30,  5
//   normalized error 0, 0.5, 0.25, 1.5, 0.25
const std::vector<Box> kFixtureGt = {{0, 0, 10, 10}, {0, 0, 10, 10}, {0, 0, 10, 10}, {0, 0, 20, 20}, {0, 0, 10, 20}};
const std::vector<Box> kFixtureTraj = {{0, 0, 10, 10}, {5, 0, 10, 10}, {0, 0, 5, 10}, {30, 0, 20, 20}, {0, 0, 10, 10}};

std::vector<Box> shifted(const std::vector<Box>& boxes, double dx, double dy) {
    std::vector<Box> out = boxes;
    for (Box& b : out) {
        b.x += dx;
        b.y += dy;
    }
    return out;
}

std::vector<Box> random_boxes(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> pos(0, 200), side(5, 60);
    std::vector<Box> out;
    for (int i = 0; i < n; ++i) {
        out.push_back({pos(rng), pos(rng), side(rng), side(rng)});
    }
    return out;
}

}  // namespace

TEST(Success, PerfectTrajectoryMissesOnlyTheLastThreshold) {
    std::mt19937_64 rng(1);
    const auto gt = random_boxes(rng, 37);
    const EvalCurve c = success_curve(gt, gt);
    ASSERT_EQ(c.thresholds.size(), 101u);
    EXPECT_EQ(c.values.back(), 0.0);
    EXPECT_EQ(c.summary, 100.0 / 101.0);
}

TEST(Success, DisjointIsZero) {
    const std::vector<Box> gt(4, Box{0, 0, 10, 10});
    const std::vector<Box> tr(4, Box{50, 50, 10, 10});
    EXPECT_EQ(success_curve(tr, gt).summary, 0.0);
}

TEST(Success, TwoFrameToy) {
    const std::vector<Box> gt = {{0, 0, 10, 10}, {0, 0, 10, 10}};
    const std::vector<Box> tr = {{0, 0, 10, 10}, {0, 0, 5, 10}};
    const EvalCurve c = success_curve(tr, gt);
    EXPECT_EQ(c.summary, 150.0 / 202.0);
    EXPECT_EQ(c.values[49], 1.0);
    EXPECT_EQ(c.values[50], 0.5);
}

TEST(Precision, Examples) {
    std::mt19937_64 rng(2);
    const auto gt = random_boxes(rng, 10);
    EXPECT_EQ(precision_curve(gt, gt).summary, 1.0);

    std::vector<Box> grid = gt;  // integer corners keep the 25 px distance exact
    for (Box& b : grid) {
        b = {std::round(b.x), std::round(b.y), std::round(b.w), std::round(b.h)};
    }
    const EvalCurve off = precision_curve(shifted(grid, 15, 20), grid);
    EXPECT_EQ(off.summary, 0.0);
    EXPECT_EQ(off.values[24], 0.0);
    EXPECT_EQ(off.values[25], 1.0);

    const std::vector<Box> g2 = {{0, 0, 10, 10}, {0, 0, 10, 10}};
    const std::vector<Box> t2 = {{0, 0, 10, 10}, {30, 0, 10, 10}};
    EXPECT_EQ(precision_curve(t2, g2).summary, 0.5);
}

TEST(NormPrecision, Examples) {
    std::mt19937_64 rng(3);
    const auto gt = random_boxes(rng, 10);
    // error 0 passes every threshold including 0 under "<="
    EXPECT_EQ(norm_precision_curve(gt, gt).summary, 1.0);

    const std::vector<Box> g = {{0, 0, 40, 40}, {10, 10, 40, 40}};
    EXPECT_EQ(norm_precision_curve(shifted(g, 10, 0), g).summary, 51.0 / 101.0);
    EXPECT_EQ(norm_precision_curve(shifted(g, 40, 0), g).summary, 0.0);
}

TEST(NormPrecision, DegenerateGroundTruthIsSkipped) {
    const std::vector<Box> g = {{0, 0, 10, 10}, {0, 0, 0, 10}, {0, 0, 10, 10}};
    const EvalCurve c = norm_precision_curve(g, g);
    EXPECT_EQ(c.skipped, 1);
    EXPECT_EQ(c.summary, 1.0);
}

TEST(Metrics, FiveFrameFixtureExact) {
    const SequenceMetrics m = evaluate_sequence("fixture", kFixtureTraj, kFixtureGt);
    EXPECT_EQ(m.frames, 5);
    // success passes: 4 frames for t <= 0.33 (34 thresholds), 3 for 0.34..0.49 (16), 1 for 0.50..0.99 (50)
    EXPECT_EQ(m.auc, 234.0 / 505.0);
    EXPECT_EQ(m.precision, 0.8);
    // norm passes: 101 (error 0) + 1 (error 0.5) + 2 * 51 (error 0.25)
    EXPECT_EQ(m.norm_precision, 204.0 / 505.0);
}

TEST(Metrics, CurvesAreMonotoneAndBounded) {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 50; ++k) {
        const auto gt = random_boxes(rng, 30);
        const auto tr = random_boxes(rng, 30);
        const EvalCurve s = success_curve(tr, gt);
        const EvalCurve p = precision_curve(tr, gt);
        const EvalCurve n = norm_precision_curve(tr, gt);
        for (std::size_t i = 1; i < s.values.size(); ++i) {
            ASSERT_LE(s.values[i], s.values[i - 1]);
        }
        for (const EvalCurve* c : {&p, &n}) {
            for (std::size_t i = 1; i < c->values.size(); ++i) {
                ASSERT_GE(c->values[i], c->values[i - 1]);
            }
        }
        for (const EvalCurve* c : {&s, &p, &n}) {
            for (double v : c->values) {
                ASSERT_GE(v, 0.0);
                ASSERT_LE(v, 1.0);
            }
        }
    }
}

TEST(Metrics, InvariantUnderFramePermutation) {
    std::mt19937_64 rng(5);
    auto gt = random_boxes(rng, 50);
    auto tr = shifted(gt, 3, -2);
    for (std::size_t i = 0; i < tr.size(); i += 3) {
        tr[i] = random_boxes(rng, 1)[0];
    }
    const SequenceMetrics a = evaluate_sequence("a", tr, gt);
    std::vector<std::size_t> order(gt.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Box> gt2, tr2;
    for (std::size_t i : order) {
        gt2.push_back(gt[i]);
        tr2.push_back(tr[i]);
    }
    const SequenceMetrics b = evaluate_sequence("a", tr2, gt2);
    EXPECT_EQ(a, b);
}

TEST(Metrics, LengthMismatchNamesBothLengths) {
    const std::vector<Box> a(3, Box{0, 0, 1, 1}), b(5, Box{0, 0, 1, 1});
    try {
        evaluate_sequence("x", a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "length mismatch: trajectory has 3 frames, ground truth has 5");
    }
}

TEST(Report, SingleSubsetOfEverythingEqualsGlobal) {
    std::mt19937_64 rng(6);
    std::vector<SequenceMetrics> rows;
    SubsetSpec all{"all", {}};
    for (int i = 0; i < 12; ++i) {
        const auto gt = random_boxes(rng, 20);
        rows.push_back(evaluate_sequence("s" + std::to_string(i), random_boxes(rng, 20), gt));
        all.sequences.push_back(rows.back().name);
    }
    const std::vector<SubsetSpec> specs{all};
    const Report r = attribute_report(rows, specs);
    EXPECT_EQ(r.subsets[0].subset.auc, r.overall.auc);
    EXPECT_EQ(r.subsets[0].subset.precision, r.overall.precision);
    EXPECT_EQ(r.subsets[0].complement.count, 0);
    EXPECT_TRUE(std::isnan(r.subsets[0].complement.auc));
}

TEST(Report, PartitionReconstructsGlobalMean) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<SequenceMetrics> rows;
        SubsetSpec sub{"similar", {}};
        const int n = 2 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            const auto gt = random_boxes(rng, 10);
            auto tr = shifted(gt, static_cast<double>(rng() % 20), 0);
            rows.push_back(evaluate_sequence("q" + std::to_string(i), tr, gt));
            if (i == 0 || (rng() % 3 == 0 && i != n - 1)) {
                sub.sequences.push_back(rows.back().name);
            }
        }
        const std::vector<SubsetSpec> specs{sub};
        const Report r = attribute_report(rows, specs);
        const MetricMeans& s = r.subsets[0].subset;
        const MetricMeans& c = r.subsets[0].complement;
        ASSERT_EQ(s.count + c.count, n);
        const auto combine = [&](double a, double b) { return (a * s.count + b * c.count) / n; };
        ASSERT_NEAR(combine(s.auc, c.auc), r.overall.auc, 1e-9);
        ASSERT_NEAR(combine(s.precision, c.precision), r.overall.precision, 1e-9);
        ASSERT_NEAR(combine(s.norm_precision, c.norm_precision), r.overall.norm_precision, 1e-9);
    }
}

TEST(Report, UnknownSequenceIsListed) {
    const std::vector<SequenceMetrics> rows = {{"a", 1, 1, 1, 1, 0}};
    const std::vector<SubsetSpec> specs = {{"s", {"a", "ghost", "phantom"}}};
    try {
        attribute_report(rows, specs);
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "unknown sequence(s) in subsets: ghost, phantom");
    }
}

TEST(Report, JsonRoundTripAndTable) {
    const auto dir = std::filesystem::temp_directory_path() / "trackpp_test_report";
    std::filesystem::remove_all(dir);
    const std::vector<SequenceMetrics> rows = {evaluate_sequence("fx", kFixtureTraj, kFixtureGt),
                                               evaluate_sequence("id", kFixtureGt, kFixtureGt)};
    const std::vector<SubsetSpec> specs = {{"similar", {"fx"}}};
    const Report r = attribute_report(rows, specs, "dbpp");
    write_report(dir / "r.json", r);
    const Report back = read_report(dir / "r.json");
    EXPECT_EQ(back.label, "dbpp");
    EXPECT_EQ(back.sequences, r.sequences);
    EXPECT_EQ(back.overall.auc, r.overall.auc);
    ASSERT_EQ(back.subsets.size(), 1u);
    EXPECT_EQ(back.subsets[0].complement.auc, r.subsets[0].complement.auc);

    Report better = r;
    better.label = "mbpp";
    better.overall.auc += 0.05;
    const std::vector<Report> both{r, better};
    const std::string table = comparison_table(both);
    EXPECT_NE(table.find("mbpp"), std::string::npos);
    EXPECT_NE(table.find("+5.00"), std::string::npos);

    write_report_csv(dir / "r.csv", r);
    std::ifstream csv(dir / "r.csv");
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "sequence,frames,auc,precision,norm_precision");
    std::filesystem::remove_all(dir);
}

TEST(Subsets, BundledSimilarSubsetHas28Sequences) {
    const auto specs = read_subsets(std::filesystem::path(TRACKPP_DATA_DIR) / "uot100_similar_subsets.yaml");
    ASSERT_EQ(specs.size(), 1u);
    EXPECT_EQ(specs[0].sequences.size(), 28u);
    const std::set<std::string> unique(specs[0].sequences.begin(), specs[0].sequences.end());
    EXPECT_EQ(unique.size(), 28u);
    EXPECT_TRUE(unique.contains("ArmyDiver1"));
    EXPECT_TRUE(unique.contains("WhiteShark"));
}
