#pragma once

#include <array>
#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vfropt/ladder.hpp"
#include "vfropt/measurements.hpp"

namespace vfropt {

// Stages of the measurement pipeline, in the order they run for every
// (sequence, rung, framerate) triple. The library only plans these jobs for
// external tools; it never launches codecs or scalers itself.
enum class Stage {
    kSpatialDown,
    kTemporalDown,
    kEncode,
    kTemporalUp,
    kSpatialUp,
    kDecode,
    kMeasureQuality,
};

inline constexpr std::array<Stage, 7> kStageOrder = {
    Stage::kSpatialDown, Stage::kTemporalDown, Stage::kEncode,  Stage::kTemporalUp,
    Stage::kSpatialUp,   Stage::kDecode,       Stage::kMeasureQuality,
};

std::string_view stage_name(Stage stage);
Stage stage_from_name(std::string_view name);  // throws Error on unknown name

// One planned invocation of an external tool. args is the command template
// split on whitespace with every placeholder substituted.
struct Job {
    Stage stage = Stage::kSpatialDown;
    std::string sequence_id;
    Representation rung;
    int framerate_fps = 0;
    std::string command_template_id;  // the stage key the template came from
    std::vector<std::string> args;

    friend bool operator==(const Job&, const Job&) = default;
};

struct JobPlan {
    std::vector<Job> jobs;

    friend bool operator==(const JobPlan&, const JobPlan&) = default;
};

// Command template per stage. Templates use brace-delimited placeholders
// (no nesting): {input} {output} {bitrate_kbps} {height_px} {framerate_fps}.
// {input}/{output} are substituted with canonical per-triple paths
// ("<seq>/<b>kbps_<r>p_<f>fps/<stage artifact>"); the numeric placeholders
// with the triple's values. Every template must use {input} and {output};
// in addition spatial stages must use {height_px}, temporal stages
// {framerate_fps}, and encode {bitrate_kbps}.
using StageTemplates = std::map<Stage, std::string>;

// Expands the template set over sequences x rungs x framerates. The plan has
// |sequences| * |rungs| * |framerates| * 7 jobs, ordered by (sequence,
// bitrate, framerate, stage order); identical inputs yield identical plans
// byte-for-byte once serialized. Throws Error on a missing stage template,
// an unknown placeholder, or a required placeholder the template fails to
// use (the message names the stage).
JobPlan build_plan(std::span<const std::string> sequences, const Ladder& ladder,
                   const StageTemplates& templates);

// Plan JSON:
//   { "jobs": [ {"stage": "...", "sequence": "...", "bitrate_kbps": n,
//                "height_px": n, "framerate_fps": n, "args": [...] }, ... ] }
std::string plan_to_json(const JobPlan& plan);

// Templates JSON: { "<stage name>": "<command template>", ... }
StageTemplates load_templates_json(std::istream& in);

// Identifies one pipeline job in an energy log.
struct JobKey {
    std::string sequence_id;
    int bitrate_kbps = 0;
    int height_px = 0;
    int framerate_fps = 0;
    Stage stage = Stage::kDecode;

    friend auto operator<=>(const JobKey&, const JobKey&) = default;
};

std::string job_key_to_string(const JobKey& key);

struct EnergyLogEntry {
    JobKey key;
    int run_index = 0;  // 1..3
    double energy_j = 0.0;

    friend bool operator==(const EnergyLogEntry&, const EnergyLogEntry&) = default;
};

struct EnergyLog {
    std::vector<EnergyLogEntry> entries;
};

// Energy log CSV header:
//   sequence,bitrate_kbps,height_px,framerate_fps,stage,run_index,energy_j
// Throws ParseError with line numbers on malformed rows, unknown stages,
// run_index outside 1..3, or negative energy.
EnergyLog parse_energy_log_csv(std::istream& in);

// kExactlyThree mirrors the triple-run measurement protocol; kAtLeastOne
// relaxes it to the mean of however many runs a foreign dataset provides.
enum class RunPolicy { kExactlyThree, kAtLeastOne };

// Arithmetic mean of the runs recorded per job key. Under kExactlyThree a
// key with any run count other than 3 (or duplicate run indices) is an
// error naming the key. Run order never matters.
std::map<JobKey, double> average_energy(const EnergyLog& log,
                                        RunPolicy policy = RunPolicy::kExactlyThree);

// Returns a copy of the table with decode_energy_j replaced by the averaged
// values; every other field is untouched. Keys must have stage == kDecode
// and refer to existing grid cells. An empty map returns the table
// unchanged.
MeasurementTable merge_energy(const MeasurementTable& table,
                              const std::map<JobKey, double>& decode_energy);

}  // namespace vfropt
