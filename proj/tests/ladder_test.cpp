#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "vfropt/errors.hpp"
#include "vfropt/ladder.hpp"
#include "vfropt/measurements.hpp"
#include "vfropt/synthetic.hpp"

using namespace vfropt;

namespace {

constexpr const char* kHeader =
    "sequence,bitrate_kbps,height_px,framerate_fps,vmaf,psnr_db,ssim,"
    "decode_energy_j,encode_energy_j\n";

MeasurementTable parse_csv_string(const std::string& body, const Ladder& ladder) {
    std::istringstream in(body);
    return parse_measurements(in, MeasurementFormat::kCsv, ladder);
}

}  // namespace

TEST_CASE("default ladder matches the published configuration") {
    Ladder ladder = default_ladder();
    REQUIRE(ladder.rungs.size() == 12);
    CHECK(ladder.rungs.front() == Representation{145, 360});
    CHECK(ladder.rungs.back() == Representation{16800, 2160});
    CHECK(ladder.rungs[4] == Representation{1600, 540});
    CHECK(ladder.framerates.values == std::vector<int>{24, 30, 48, 60});
    CHECK(ladder.thresholds == std::vector<double>{1, 2, 4, 6});
    CHECK_NOTHROW(validate_ladder(ladder));
    CHECK(default_ladder() == ladder);  // pure
}

TEST_CASE("ladder validation rejects broken configurations") {
    Ladder ladder = default_ladder();
    SUBCASE("empty rungs") {
        ladder.rungs.clear();
        CHECK_THROWS_AS(validate_ladder(ladder), Error);
    }
    SUBCASE("non-increasing bitrates") {
        ladder.rungs[1].bitrate_kbps = ladder.rungs[0].bitrate_kbps;
        CHECK_THROWS_AS(validate_ladder(ladder), Error);
    }
    SUBCASE("non-positive height") {
        ladder.rungs[0].height_px = 0;
        CHECK_THROWS_AS(validate_ladder(ladder), Error);
    }
    SUBCASE("unsorted framerates") {
        ladder.framerates.values = {30, 24};
        CHECK_THROWS_AS(validate_ladder(ladder), Error);
    }
    SUBCASE("negative threshold") {
        ladder.thresholds = {-1, 2};
        CHECK_THROWS_AS(validate_ladder(ladder), Error);
    }
    SUBCASE("duplicate threshold") {
        ladder.thresholds = {1, 1};
        CHECK_THROWS_AS(validate_ladder(ladder), Error);
    }
}

TEST_CASE("ladder JSON round-trips") {
    Ladder ladder = default_ladder();
    std::ostringstream out;
    save_ladder_json(ladder, out);
    std::istringstream in(out.str());
    CHECK(load_ladder_json(in) == ladder);
}

TEST_CASE("csv row parses into a record") {
    std::string body = std::string(kHeader) + "seq0286,145,360,24,61.2,33.1,0.91,4.8,120.0\n";
    MeasurementTable table = parse_csv_string(body, default_ladder());
    REQUIRE(table.size() == 1);
    const MeasurementRecord* rec = table.find("seq0286", 145, 360, 24);
    REQUIRE(rec != nullptr);
    CHECK(rec->bitrate_kbps == 145);
    CHECK(rec->height_px == 360);
    CHECK(rec->framerate_fps == 24);
    CHECK(rec->vmaf == doctest::Approx(61.2));
    CHECK(rec->psnr_db == doctest::Approx(33.1));
    CHECK(rec->ssim == doctest::Approx(0.91));
    CHECK(rec->decode_energy_j == doctest::Approx(4.8));
    CHECK(rec->encode_energy_j == doctest::Approx(120.0));
}

TEST_CASE("empty body with valid header gives an empty table") {
    MeasurementTable table = parse_csv_string(kHeader, default_ladder());
    CHECK(table.size() == 0);
    CHECK(table.empty());
}

TEST_CASE("optional columns may be empty") {
    std::string body = std::string(kHeader) + "s,145,360,24,61.2,33.1,,4.8,\n";
    MeasurementTable table = parse_csv_string(body, default_ladder());
    const MeasurementRecord* rec = table.find("s", 145, 360, 24);
    REQUIRE(rec != nullptr);
    CHECK_FALSE(rec->ssim.has_value());
    CHECK_FALSE(rec->encode_energy_j.has_value());
}

TEST_CASE("parse errors carry line numbers and field names") {
    SUBCASE("vmaf above 100") {
        std::string body = std::string(kHeader) + "s,145,360,24,101,33.1,,4.8,\n";
        try {
            parse_csv_string(body, default_ladder());
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
            CHECK(std::string(e.what()).find("vmaf") != std::string::npos);
        }
    }
    SUBCASE("malformed number") {
        std::string body = std::string(kHeader) + "s,145,360,24,abc,33.1,,4.8,\n";
        try {
            parse_csv_string(body, default_ladder());
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("wrong field count") {
        std::string body = std::string(kHeader) + "s,145,360,24\n";
        CHECK_THROWS_AS(parse_csv_string(body, default_ladder()), ParseError);
    }
    SUBCASE("duplicate key") {
        std::string body = std::string(kHeader) +
                           "s,145,360,24,50,30,,4.8,\n"
                           "s,145,360,24,51,30,,4.9,\n";
        try {
            parse_csv_string(body, default_ladder());
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
            CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
        }
    }
    SUBCASE("unknown rung") {
        std::string body = std::string(kHeader) + "s,999,360,24,50,30,,4.8,\n";
        try {
            parse_csv_string(body, default_ladder());
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("unknown rung") != std::string::npos);
        }
    }
    SUBCASE("bad header") {
        CHECK_THROWS_AS(parse_csv_string("a,b,c\n", default_ladder()), ParseError);
    }
}

TEST_CASE("ssim out of range is rejected") {
    std::string body = std::string(kHeader) + "s,145,360,24,50,30,1.5,4.8,\n";
    CHECK_THROWS_AS(parse_csv_string(body, default_ladder()), ParseError);
}

TEST_CASE("csv and json serialization round-trip") {
    MeasurementTable table = generate(fixtures::standard_model(), default_ladder(), 2);

    for (MeasurementFormat format : {MeasurementFormat::kCsv, MeasurementFormat::kJson}) {
        std::ostringstream out;
        serialize_measurements(table, format, out);
        std::istringstream in(out.str());
        MeasurementTable reparsed = parse_measurements(in, format, table.ladder());
        CHECK(reparsed == table);
    }
}

TEST_CASE("round-trip preserves absent optional columns") {
    MeasurementTable table(default_ladder());
    MeasurementRecord rec;
    rec.sequence_id = "s";
    rec.bitrate_kbps = 145;
    rec.height_px = 360;
    rec.framerate_fps = 24;
    rec.vmaf = 50;
    rec.psnr_db = 30;
    rec.decode_energy_j = 4.5;
    table.insert(rec);

    for (MeasurementFormat format : {MeasurementFormat::kCsv, MeasurementFormat::kJson}) {
        std::ostringstream out;
        serialize_measurements(table, format, out);
        std::istringstream in(out.str());
        CHECK(parse_measurements(in, format, table.ladder()) == table);
    }
}

TEST_CASE("completeness: full grid has no missing cells") {
    MeasurementTable table = generate(fixtures::standard_model(), default_ladder(), 1);
    CHECK(validate_completeness(table).empty());
}

TEST_CASE("completeness: a single deleted cell is reported exactly once") {
    MeasurementTable full = generate(fixtures::standard_model(), default_ladder(), 1);

    MeasurementTable pruned(full.ladder());
    for (const auto& [key, rec] : full.records()) {
        if (rec.bitrate_kbps == 900 && rec.framerate_fps == 48) continue;
        pruned.insert(rec);
    }
    auto missing = validate_completeness(pruned);
    REQUIRE(missing.size() == 1);
    CHECK(missing[0] == MissingCell{"seq0000", 900, 540, 48});
}

TEST_CASE("completeness: one sequence missing every 48 fps row") {
    MeasurementTable full = generate(fixtures::standard_model(), default_ladder(), 2);

    MeasurementTable pruned(full.ladder());
    for (const auto& [key, rec] : full.records()) {
        if (rec.sequence_id == "seq0001" && rec.framerate_fps == 48) continue;
        pruned.insert(rec);
    }
    auto missing = validate_completeness(pruned);

    // Independent expectation: enumerate the grid minus the records kept.
    std::vector<MissingCell> expected;
    for (const Representation& rung : full.ladder().rungs) {
        expected.push_back({"seq0001", rung.bitrate_kbps, rung.height_px, 48});
    }
    CHECK(missing == expected);
    REQUIRE(missing.size() == 12);
    for (const MissingCell& cell : missing) CHECK(cell.framerate_fps == 48);
}

TEST_CASE("completeness count equals grid size minus records") {
    oracles::Rng rng(2024);
    MeasurementTable full = generate(fixtures::standard_model(), default_ladder(), 3);
    const std::size_t grid = 3 * 12 * 4;

    for (int trial = 0; trial < 20; ++trial) {
        MeasurementTable pruned(full.ladder());
        std::size_t kept = 0;
        for (const auto& [key, rec] : full.records()) {
            if (rng.uniform01() < 0.15) continue;
            pruned.insert(rec);
            ++kept;
        }
        // Sequences with every record removed drop out of the grid as well.
        std::size_t sequences_present = pruned.sequences().size();
        CHECK(validate_completeness(pruned).size() == sequences_present * 12 * 4 - kept);
    }
}

TEST_CASE("records with framerates outside the ladder set are kept but not required") {
    std::string body = std::string(kHeader) + "s,145,360,120,50,30,,4.8,\n";
    MeasurementTable table = parse_csv_string(body, default_ladder());
    CHECK(table.size() == 1);
    // The completeness grid covers the ladder framerates only.
    auto missing = validate_completeness(table);
    CHECK(missing.size() == 12 * 4);
}
