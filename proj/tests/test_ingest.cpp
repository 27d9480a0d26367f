#include <doctest.h>

#include <fstream>
#include <set>

#include "cadence/error.hpp"
#include "cadence/ingest.hpp"
#include "helpers.hpp"

using namespace cadence;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures{CADENCE_FIXTURES};

void check_intervals_within(const LabeledRecording& lr) {
    const auto start = lr.recording.start_time_ms;
    const auto end = static_cast<std::int64_t>(std::llround(lr.recording.end_time_ms()));
    for (const auto& iv : lr.intervals) {
        CHECK(iv.start_ms >= start);
        CHECK(iv.end_ms <= end);
        CHECK(iv.start_ms < iv.end_ms);
    }
}

}  // namespace

TEST_CASE("dataset descriptors") {
    CHECK(describe(DatasetKind::Pamap2).sample_rate_hz == 100.0);
    CHECK(describe(DatasetKind::MHealth).sample_rate_hz == 50.0);
    CHECK(describe(DatasetKind::HmpAdl).sample_rate_hz == 32.0);
    CHECK(describe(DatasetKind::DailySports).sample_rate_hz == 25.0);
    // 18 protocol activities plus the null code.
    CHECK(describe(DatasetKind::Pamap2).activities.size() == 19);
    CHECK(describe(DatasetKind::MHealth).activities.size() == 13);
    CHECK(describe(DatasetKind::HmpAdl).activities.size() == 14);
    CHECK(describe(DatasetKind::DailySports).activities.size() == 19);
    CHECK(parse_dataset_kind("mhealth") == DatasetKind::MHealth);
    CHECK_THROWS_AS(parse_dataset_kind("ucihar"), Error);
}

TEST_CASE("PAMAP2 fixture") {
    const auto data = load_dataset(describe(DatasetKind::Pamap2), kFixtures / "pamap2");
    // The one second timestamp gap splits the file into two streams.
    REQUIRE(data.size() == 2);
    const auto names = describe(DatasetKind::Pamap2).activities;
    std::set<std::string> allowed;
    for (const auto& [code, name] : names) allowed.insert(name);
    std::size_t total = 0;
    for (const auto& lr : data) {
        CHECK(lr.recording.sample_rate_hz == 100.0);
        CHECK(lr.recording.subject_id == "subject101");
        CHECK(lr.recording.unit_scale == doctest::Approx(1.0 / kStandardGravity));
        for (const auto& iv : lr.intervals) CHECK(allowed.count(iv.activity) == 1);
        check_intervals_within(lr);
        total += lr.recording.samples.size();
    }
    // 700 rows, one with NaN accelerations.
    CHECK(total == 699);
    CHECK(data[0].recording.start_time_ms == 5640);
    CHECK(data[0].intervals.front().activity == "null");
    CHECK(data[0].intervals[1].activity == "walking");
}

TEST_CASE("MHealth fixture") {
    const auto data = load_dataset(describe(DatasetKind::MHealth), kFixtures / "mhealth");
    REQUIRE(data.size() == 1);
    const auto& lr = data[0];
    CHECK(lr.recording.sample_rate_hz == 50.0);
    CHECK(lr.recording.subject_id == "subject1");
    CHECK(lr.recording.samples.size() == 900);
    REQUIRE(lr.intervals.size() == 4);
    CHECK(lr.intervals[1].activity == "standing_still");
    CHECK(lr.intervals[1].start_ms == 2000);
    CHECK(lr.intervals[1].end_ms == 10000);
    CHECK(lr.recording.samples[0][0] == doctest::Approx(9.8));
    check_intervals_within(lr);
}

TEST_CASE("HMP ADL fixture") {
    const auto data = load_dataset(describe(DatasetKind::HmpAdl), kFixtures / "hmpadl");
    REQUIRE(data.size() == 2);
    for (const auto& lr : data) {
        CHECK(lr.recording.sample_rate_hz == 32.0);
        REQUIRE(lr.intervals.size() == 1);
        check_intervals_within(lr);
        for (const auto& s : lr.recording.samples) {
            for (double v : s) {
                CHECK(v >= -1.5);
                CHECK(v <= 1.5);
            }
        }
    }
    CHECK(data[0].intervals[0].activity == "Drink_glass");
    CHECK(data[1].intervals[0].activity == "Walk");
    CHECK(data[1].recording.subject_id == "f1");
    // 2011-03-24 10:24:39 UTC
    CHECK(data[1].recording.start_time_ms == 1300962279000LL);
    // Code 22 on the first row.
    CHECK(data[1].recording.samples[0][0] == doctest::Approx(-1.5 + 3.0 * 22.0 / 63.0));
}

TEST_CASE("Daily and Sports fixture") {
    const auto data = load_dataset(describe(DatasetKind::DailySports), kFixtures / "dailysports");
    // Three (activity, subject) folders, two arms each.
    REQUIRE(data.size() == 6);
    for (const auto& lr : data) {
        CHECK(lr.recording.sample_rate_hz == 25.0);
        check_intervals_within(lr);
    }
    CHECK(data[0].recording.samples.size() == 250);
    CHECK(data[0].intervals[0].activity == "sitting");
    CHECK(data[0].recording.samples[0][0] == doctest::Approx(9.8));
    CHECK(data[1].recording.samples[0][0] == doctest::Approx(-9.8));
    CHECK(data[2].recording.samples.size() == 375);
    CHECK(data[2].intervals[0].activity == "walking_parking_lot");
}

TEST_CASE("malformed rows report file and line") {
    const auto dir = testing::scratch_dir("bad_mhealth");
    {
        std::ofstream f(dir / "mHealth_subject9.log");
        for (int i = 0; i < 3; ++i) {
            for (int c = 0; c < 23; ++c) f << (i == 2 && c == 15 ? "abc" : "0.5") << "\t";
            f << "1\n";
        }
    }
    try {
        load_dataset(describe(DatasetKind::MHealth), dir);
        FAIL("expected RecordParse");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::RecordParse);
        CHECK(std::string(e.what()).find("mHealth_subject9.log:3") != std::string::npos);
    }
}

TEST_CASE("too few columns") {
    const auto dir = testing::scratch_dir("short_pamap");
    std::ofstream(dir / "subject1.dat") << "0.01 1 100 30.0 1.0\n";
    try {
        load_dataset(describe(DatasetKind::Pamap2), dir);
        FAIL("expected MissingColumns");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingColumns);
    }
}

TEST_CASE("empty dataset directory is an unknown layout") {
    const auto dir = testing::scratch_dir("empty_layout");
    try {
        load_dataset(describe(DatasetKind::MHealth), dir);
        FAIL("expected UnknownLayout");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownLayout);
    }
}

TEST_CASE("canonical round trip") {
    const auto dir = testing::scratch_dir("canonical");
    std::vector<LabeledRecording> data(2);
    cadence::Rng rng(11);
    for (int s = 0; s < 2; ++s) {
        auto& r = data[static_cast<std::size_t>(s)].recording;
        r.subject_id = "subj" + std::to_string(s);
        r.device_id = "wrist";
        r.sample_rate_hz = 30.0;
        r.start_time_ms = 1000 * s;
        for (int i = 0; i < 123 + s; ++i) r.samples.push_back({gaussian(rng), gaussian(rng), gaussian(rng)});
    }
    data[0].intervals = {{"walk", 0, 2000}, {"null", 2000, 4100}};
    write_canonical(data, dir);
    const auto back = read_canonical(dir);
    REQUIRE(back.size() == 2);
    double worst = 0.0;
    for (std::size_t s = 0; s < 2; ++s) {
        CHECK(back[s].recording.subject_id == data[s].recording.subject_id);
        CHECK(back[s].recording.start_time_ms == data[s].recording.start_time_ms);
        REQUIRE(back[s].recording.samples.size() == data[s].recording.samples.size());
        for (std::size_t i = 0; i < data[s].recording.samples.size(); ++i) {
            for (int a = 0; a < 3; ++a) {
                worst = std::max(worst, std::abs(back[s].recording.samples[i][static_cast<std::size_t>(a)] -
                                                 data[s].recording.samples[i][static_cast<std::size_t>(a)]));
            }
        }
    }
    CHECK(worst < 1e-9);
    REQUIRE(back[0].intervals.size() == 2);
    CHECK(back[0].intervals[1].activity == "null");
    CHECK(back[0].intervals[1].end_ms == 4100);
    CHECK(back[1].intervals.empty());
}

TEST_CASE("dataset_windows labels windows from intervals") {
    LabeledRecording lr;
    lr.recording.subject_id = "a";
    lr.recording.sample_rate_hz = 30.0;
    lr.recording.samples.assign(30 * 35, Vec3{0, 0, 1});
    lr.intervals = {{"walk", 0, 20000}, {"null", 20000, 35000}};
    const auto w = dataset_windows({lr});
    REQUIRE(w.size() == 3);
    CHECK(w[0].label == "walk");
    CHECK(w[1].label == "walk");
    CHECK(w[2].label == "null");
}
