#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "fixtures.hpp"
#include "vfropt/errors.hpp"
#include "vfropt/pipeline.hpp"
#include "vfropt/synthetic.hpp"

using namespace vfropt;

namespace {

StageTemplates full_templates() {
    return {
        {Stage::kSpatialDown, "scaler --height {height_px} -i {input} -o {output}"},
        {Stage::kTemporalDown, "framedrop --fps {framerate_fps} -i {input} -o {output}"},
        {Stage::kEncode, "encoder --bitrate {bitrate_kbps}k -i {input} -o {output}"},
        {Stage::kTemporalUp, "interp --fps {framerate_fps} -i {input} -o {output}"},
        {Stage::kSpatialUp, "scaler --height {height_px} -i {input} -o {output}"},
        {Stage::kDecode, "decoder -i {input} -o {output}"},
        {Stage::kMeasureQuality, "metrics -i {input} -o {output}"},
    };
}

std::string energy_header() {
    return "sequence,bitrate_kbps,height_px,framerate_fps,stage,run_index,energy_j\n";
}

}  // namespace

TEST_CASE("plan covers the full grid with seven ordered stages per triple") {
    std::vector<std::string> sequences = {"seq0"};
    JobPlan plan = build_plan(sequences, default_ladder(), full_templates());
    REQUIRE(plan.jobs.size() == 1 * 12 * 4 * 7);

    for (std::size_t i = 0; i < plan.jobs.size(); i += 7) {
        for (std::size_t s = 0; s < 7; ++s) {
            const Job& job = plan.jobs[i + s];
            CHECK(job.stage == kStageOrder[s]);
            // All seven jobs of a block share one triple.
            CHECK(job.sequence_id == plan.jobs[i].sequence_id);
            CHECK(job.rung == plan.jobs[i].rung);
            CHECK(job.framerate_fps == plan.jobs[i].framerate_fps);
        }
    }
}

TEST_CASE("plan serialization is deterministic") {
    std::vector<std::string> sequences = {"a", "b"};
    JobPlan first = build_plan(sequences, default_ladder(), full_templates());
    JobPlan second = build_plan(sequences, default_ladder(), full_templates());
    CHECK(first == second);
    CHECK(plan_to_json(first) == plan_to_json(second));
}

TEST_CASE("plan substitutes placeholders with triple-specific values") {
    std::vector<std::string> sequences = {"clip"};
    Ladder ladder = default_ladder();
    ladder.rungs = {{145, 360}};
    ladder.framerates.values = {24};
    JobPlan plan = build_plan(sequences, ladder, full_templates());
    REQUIRE(plan.jobs.size() == 7);

    const Job& encode = plan.jobs[2];
    CHECK(encode.stage == Stage::kEncode);
    CHECK(encode.command_template_id == "encode");
    REQUIRE(encode.args.size() == 7);
    CHECK(encode.args[0] == "encoder");
    CHECK(encode.args[2] == "145k");
    CHECK(encode.args[4] == "clip/145kbps_360p_24fps/temporal_down.y4m");
    CHECK(encode.args[6] == "clip/145kbps_360p_24fps/encoded.hevc");

    const Job& spatial_down = plan.jobs[0];
    CHECK(spatial_down.args[4] == "clip/source.y4m");
}

TEST_CASE("plan rejects missing or malformed templates") {
    std::vector<std::string> sequences = {"s"};

    SUBCASE("missing stage template") {
        StageTemplates templates = full_templates();
        templates.erase(Stage::kDecode);
        try {
            build_plan(sequences, default_ladder(), templates);
            FAIL("expected Error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("decode") != std::string::npos);
        }
    }
    SUBCASE("template without a required placeholder") {
        StageTemplates templates = full_templates();
        templates[Stage::kTemporalDown] = "framedrop -i {input} -o {output}";
        try {
            build_plan(sequences, default_ladder(), templates);
            FAIL("expected Error");
        } catch (const Error& e) {
            std::string msg = e.what();
            CHECK(msg.find("temporal_down") != std::string::npos);
            CHECK(msg.find("framerate_fps") != std::string::npos);
        }
    }
    SUBCASE("unknown placeholder") {
        StageTemplates templates = full_templates();
        templates[Stage::kDecode] = "decoder -i {input} -o {output} --log {logfile}";
        try {
            build_plan(sequences, default_ladder(), templates);
            FAIL("expected Error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("logfile") != std::string::npos);
        }
    }
    SUBCASE("unterminated placeholder") {
        StageTemplates templates = full_templates();
        templates[Stage::kDecode] = "decoder -i {input -o {output}";
        CHECK_THROWS_AS(build_plan(sequences, default_ladder(), templates), Error);
    }
}

TEST_CASE("templates JSON loads by stage name") {
    std::istringstream in(R"({
        "spatial_down": "a {input} {output} {height_px}",
        "decode": "b {input} {output}"
    })");
    StageTemplates templates = load_templates_json(in);
    REQUIRE(templates.size() == 2);
    CHECK(templates.at(Stage::kSpatialDown).starts_with("a "));

    std::istringstream bad(R"({"transcode": "x"})");
    CHECK_THROWS_AS(load_templates_json(bad), Error);
}

TEST_CASE("average_energy means exactly three runs") {
    EnergyLog log;
    JobKey key{"s", 145, 360, 24, Stage::kDecode};
    log.entries = {{key, 1, 10.0}, {key, 2, 11.0}, {key, 3, 12.0}};
    auto averaged = average_energy(log);
    REQUIRE(averaged.size() == 1);
    CHECK(averaged.at(key) == doctest::Approx(11.0));

    log.entries = {{key, 1, 5.0}, {key, 2, 5.0}, {key, 3, 5.0}};
    CHECK(average_energy(log).at(key) == doctest::Approx(5.0));
}

TEST_CASE("average_energy is invariant under run permutation") {
    JobKey key{"s", 145, 360, 24, Stage::kDecode};
    std::vector<EnergyLogEntry> entries = {{key, 1, 10.125}, {key, 2, 11.5}, {key, 3, 12.25}};
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.run_index < b.run_index; });
    double reference = average_energy(EnergyLog{entries}).at(key);
    do {
        CHECK(average_energy(EnergyLog{entries}).at(key) == reference);
    } while (std::next_permutation(entries.begin(), entries.end(),
                                   [](const auto& a, const auto& b) {
                                       return a.run_index < b.run_index;
                                   }));
}

TEST_CASE("average_energy rejects wrong run counts under the strict policy") {
    JobKey key{"s", 145, 360, 24, Stage::kDecode};

    EnergyLog two_runs{{{key, 1, 10.0}, {key, 2, 11.0}}};
    try {
        average_energy(two_runs);
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("s, 145 kbps") != std::string::npos);
        CHECK(std::string(e.what()).find("2 run(s)") != std::string::npos);
    }

    EnergyLog run_four{{{key, 1, 10.0}, {key, 2, 11.0}, {key, 3, 12.0}, {key, 4, 12.0}}};
    CHECK_THROWS_AS(average_energy(run_four), Error);

    EnergyLog duplicate{{{key, 1, 10.0}, {key, 1, 11.0}, {key, 3, 12.0}}};
    CHECK_THROWS_AS(average_energy(duplicate), Error);

    // Relaxed policy accepts any count of distinct runs.
    CHECK(average_energy(two_runs, RunPolicy::kAtLeastOne).at(key) ==
          doctest::Approx(10.5));
    CHECK(average_energy(run_four, RunPolicy::kAtLeastOne).at(key) ==
          doctest::Approx(11.25));
}

TEST_CASE("energy log csv parses and validates") {
    std::string body = energy_header() +
                       "s,145,360,24,decode,1,10\n"
                       "s,145,360,24,decode,2,11\n"
                       "s,145,360,24,decode,3,12\n";
    std::istringstream in(body);
    EnergyLog log = parse_energy_log_csv(in);
    REQUIRE(log.entries.size() == 3);
    CHECK(log.entries[0].key.stage == Stage::kDecode);

    std::istringstream bad_stage(energy_header() + "s,145,360,24,transcode,1,10\n");
    CHECK_THROWS_AS(parse_energy_log_csv(bad_stage), ParseError);

    std::istringstream bad_run(energy_header() + "s,145,360,24,decode,0,10\n");
    CHECK_THROWS_AS(parse_energy_log_csv(bad_run), ParseError);

    std::istringstream bad_energy(energy_header() + "s,145,360,24,decode,1,-1\n");
    CHECK_THROWS_AS(parse_energy_log_csv(bad_energy), ParseError);
}

TEST_CASE("merge_energy with an empty map is the identity") {
    MeasurementTable table = generate(fixtures::standard_model(), default_ladder(), 1);
    CHECK(merge_energy(table, {}) == table);
}

TEST_CASE("merge_energy replaces exactly the keyed records") {
    MeasurementTable table = generate(fixtures::standard_model(), default_ladder(), 1);
    JobKey key{"seq0000", 600, 540, 48, Stage::kDecode};
    MeasurementTable merged = merge_energy(table, {{key, 123.5}});

    std::size_t differing = 0;
    auto it = table.records().begin();
    for (const auto& [k, rec] : merged.records()) {
        if (!(rec == it->second)) ++differing;
        ++it;
    }
    CHECK(differing == 1);
    CHECK(merged.find("seq0000", 600, 540, 48)->decode_energy_j == doctest::Approx(123.5));
    // Quality fields untouched.
    CHECK(merged.find("seq0000", 600, 540, 48)->vmaf ==
          table.find("seq0000", 600, 540, 48)->vmaf);
}

TEST_CASE("merge_energy validates stages and grid membership") {
    MeasurementTable table = generate(fixtures::standard_model(), default_ladder(), 1);

    JobKey encode_key{"seq0000", 600, 540, 48, Stage::kEncode};
    CHECK_THROWS_AS(merge_energy(table, {{encode_key, 1.0}}), Error);

    JobKey unknown{"seq0000", 600, 540, 25, Stage::kDecode};
    CHECK_THROWS_AS(merge_energy(table, {{unknown, 1.0}}), Error);
}

TEST_CASE("a full synthetic energy log round-trips through merge") {
    MeasurementTable table = generate(fixtures::standard_model(), default_ladder(), 1);

    // Build a triple-run log whose mean reproduces the table's energies.
    std::ostringstream log_csv;
    log_csv << energy_header();
    for (const auto& [key, rec] : table.records()) {
        double e = rec.decode_energy_j;
        log_csv << rec.sequence_id << ',' << rec.bitrate_kbps << ',' << rec.height_px
                << ',' << rec.framerate_fps << ",decode,1," << e - 0.25 << '\n'
                << rec.sequence_id << ',' << rec.bitrate_kbps << ',' << rec.height_px
                << ',' << rec.framerate_fps << ",decode,2," << e << '\n'
                << rec.sequence_id << ',' << rec.bitrate_kbps << ',' << rec.height_px
                << ',' << rec.framerate_fps << ",decode,3," << e + 0.25 << '\n';
    }
    std::istringstream in(log_csv.str());
    auto averaged = average_energy(parse_energy_log_csv(in));
    MeasurementTable merged = merge_energy(table, averaged);

    CHECK(validate_completeness(merged).empty());
    for (const auto& [key, rec] : merged.records()) {
        CHECK(rec.decode_energy_j ==
              doctest::Approx(table.records().at(key).decode_energy_j).epsilon(1e-12));
    }

    std::ostringstream serialized;
    serialize_measurements(merged, MeasurementFormat::kCsv, serialized);
    std::istringstream back(serialized.str());
    CHECK(parse_measurements(back, MeasurementFormat::kCsv, merged.ladder()) == merged);
}
