#include "vfropt/pipeline.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "csv_util.hpp"
#include "vfropt/errors.hpp"

namespace vfropt {

std::string_view stage_name(Stage stage) {
    switch (stage) {
        case Stage::kSpatialDown: return "spatial_down";
        case Stage::kTemporalDown: return "temporal_down";
        case Stage::kEncode: return "encode";
        case Stage::kTemporalUp: return "temporal_up";
        case Stage::kSpatialUp: return "spatial_up";
        case Stage::kDecode: return "decode";
        case Stage::kMeasureQuality: return "measure_quality";
    }
    throw Error("unknown stage");
}

Stage stage_from_name(std::string_view name) {
    for (Stage stage : kStageOrder) {
        if (stage_name(stage) == name) return stage;
    }
    throw Error("unknown stage '" + std::string(name) + "'");
}

std::string job_key_to_string(const JobKey& key) {
    return "(" + key.sequence_id + ", " + std::to_string(key.bitrate_kbps) + " kbps, " +
           std::to_string(key.height_px) + " px, " + std::to_string(key.framerate_fps) +
           " fps, " + std::string(stage_name(key.stage)) + ")";
}

namespace {

constexpr std::string_view kAllPlaceholders[] = {"input", "output", "bitrate_kbps",
                                                 "height_px", "framerate_fps"};

std::vector<std::string_view> required_placeholders(Stage stage) {
    std::vector<std::string_view> req = {"input", "output"};
    switch (stage) {
        case Stage::kSpatialDown:
        case Stage::kSpatialUp: req.push_back("height_px"); break;
        case Stage::kTemporalDown:
        case Stage::kTemporalUp: req.push_back("framerate_fps"); break;
        case Stage::kEncode: req.push_back("bitrate_kbps"); break;
        case Stage::kDecode:
        case Stage::kMeasureQuality: break;
    }
    return req;
}

// Scans one template for {placeholder} occurrences, rejecting unknown names
// and unbalanced braces. Returns the set of placeholders the template uses.
std::vector<std::string_view> scan_template(Stage stage, const std::string& tmpl) {
    std::vector<std::string_view> used;
    std::string_view text = tmpl;
    std::size_t pos = 0;
    while ((pos = text.find('{', pos)) != std::string_view::npos) {
        std::size_t end = text.find('}', pos + 1);
        if (end == std::string_view::npos)
            throw Error("stage '" + std::string(stage_name(stage)) +
                        "': unterminated '{' in command template");
        std::string_view name = text.substr(pos + 1, end - pos - 1);
        bool known = std::find(std::begin(kAllPlaceholders), std::end(kAllPlaceholders),
                               name) != std::end(kAllPlaceholders);
        if (!known)
            throw Error("stage '" + std::string(stage_name(stage)) +
                        "': unresolved placeholder '{" + std::string(name) + "}'");
        if (std::find(used.begin(), used.end(), name) == used.end()) used.push_back(name);
        pos = end + 1;
    }
    for (std::string_view req : required_placeholders(stage)) {
        if (std::find(used.begin(), used.end(), req) == used.end())
            throw Error("stage '" + std::string(stage_name(stage)) +
                        "': template does not use required placeholder '{" +
                        std::string(req) + "}'");
    }
    return used;
}

struct StagePaths {
    std::string input;
    std::string output;
};

StagePaths stage_paths(Stage stage, const std::string& sequence_id,
                       const Representation& rung, int fps) {
    std::string dir = sequence_id + "/" + std::to_string(rung.bitrate_kbps) + "kbps_" +
                      std::to_string(rung.height_px) + "p_" + std::to_string(fps) + "fps/";
    std::string source = sequence_id + "/source.y4m";
    switch (stage) {
        case Stage::kSpatialDown: return {source, dir + "spatial_down.y4m"};
        case Stage::kTemporalDown: return {dir + "spatial_down.y4m", dir + "temporal_down.y4m"};
        case Stage::kEncode: return {dir + "temporal_down.y4m", dir + "encoded.hevc"};
        // Reconstruction continues from the encoded artifact; the decode
        // stage is the separate playback pass the energy log measures.
        case Stage::kTemporalUp: return {dir + "encoded.hevc", dir + "temporal_up.y4m"};
        case Stage::kSpatialUp: return {dir + "temporal_up.y4m", dir + "restored.y4m"};
        case Stage::kDecode: return {dir + "encoded.hevc", dir + "decoded.yuv"};
        case Stage::kMeasureQuality: return {dir + "restored.y4m", dir + "metrics.json"};
    }
    throw Error("unknown stage");
}

std::string substitute(const std::string& token, const StagePaths& paths,
                       const Representation& rung, int fps) {
    std::string out;
    out.reserve(token.size());
    std::size_t pos = 0;
    while (pos < token.size()) {
        if (token[pos] != '{') {
            out += token[pos++];
            continue;
        }
        std::size_t end = token.find('}', pos + 1);
        std::string_view name = std::string_view(token).substr(pos + 1, end - pos - 1);
        if (name == "input") out += paths.input;
        else if (name == "output") out += paths.output;
        else if (name == "bitrate_kbps") out += std::to_string(rung.bitrate_kbps);
        else if (name == "height_px") out += std::to_string(rung.height_px);
        else if (name == "framerate_fps") out += std::to_string(fps);
        pos = end + 1;
    }
    return out;
}

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream stream(text);
    std::string token;
    while (stream >> token) tokens.push_back(std::move(token));
    return tokens;
}

}  // namespace

JobPlan build_plan(std::span<const std::string> sequences, const Ladder& ladder,
                   const StageTemplates& templates) {
    validate_ladder(ladder);
    for (Stage stage : kStageOrder) {
        auto it = templates.find(stage);
        if (it == templates.end())
            throw Error("missing command template for stage '" +
                        std::string(stage_name(stage)) + "'");
        scan_template(stage, it->second);
    }

    JobPlan plan;
    plan.jobs.reserve(sequences.size() * ladder.rungs.size() *
                      ladder.framerates.values.size() * kStageOrder.size());
    for (const std::string& seq : sequences) {
        for (const Representation& rung : ladder.rungs) {
            for (int fps : ladder.framerates.values) {
                for (Stage stage : kStageOrder) {
                    StagePaths paths = stage_paths(stage, seq, rung, fps);
                    Job job;
                    job.stage = stage;
                    job.sequence_id = seq;
                    job.rung = rung;
                    job.framerate_fps = fps;
                    job.command_template_id = std::string(stage_name(stage));
                    for (const std::string& token : split_tokens(templates.at(stage))) {
                        job.args.push_back(substitute(token, paths, rung, fps));
                    }
                    plan.jobs.push_back(std::move(job));
                }
            }
        }
    }
    return plan;
}

std::string plan_to_json(const JobPlan& plan) {
    nlohmann::ordered_json doc;
    doc["jobs"] = nlohmann::ordered_json::array();
    for (const Job& job : plan.jobs) {
        nlohmann::ordered_json obj;
        obj["stage"] = std::string(stage_name(job.stage));
        obj["sequence"] = job.sequence_id;
        obj["bitrate_kbps"] = job.rung.bitrate_kbps;
        obj["height_px"] = job.rung.height_px;
        obj["framerate_fps"] = job.framerate_fps;
        obj["args"] = job.args;
        doc["jobs"].push_back(std::move(obj));
    }
    return doc.dump(2) + "\n";
}

StageTemplates load_templates_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid templates JSON: ") + e.what(), 0);
    }
    if (!doc.is_object()) throw ParseError("templates JSON must be an object", 0);
    StageTemplates templates;
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_string())
            throw ParseError("template for '" + key + "' must be a string", 0);
        templates[stage_from_name(key)] = value.get<std::string>();
    }
    return templates;
}

EnergyLog parse_energy_log_csv(std::istream& in) {
    constexpr std::string_view kHeader =
        "sequence,bitrate_kbps,height_px,framerate_fps,stage,run_index,energy_j";
    EnergyLog log;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError("missing header row", 1);
    ++line_no;
    if (detail::strip_cr(line) != kHeader)
        throw ParseError("unexpected header, want '" + std::string(kHeader) + "'", line_no);

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view row = detail::strip_cr(line);
        if (row.empty()) continue;
        auto fields = detail::split_csv_line(row);
        if (fields.size() != 7)
            throw ParseError("expected 7 fields, got " + std::to_string(fields.size()),
                             line_no);
        EnergyLogEntry entry;
        entry.key.sequence_id = std::string(fields[0]);
        entry.key.bitrate_kbps = detail::parse_int_field(fields[1], "bitrate_kbps", line_no);
        entry.key.height_px = detail::parse_int_field(fields[2], "height_px", line_no);
        entry.key.framerate_fps =
            detail::parse_int_field(fields[3], "framerate_fps", line_no);
        try {
            entry.key.stage = stage_from_name(fields[4]);
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
        entry.run_index = detail::parse_int_field(fields[5], "run_index", line_no);
        if (entry.run_index < 1)
            throw ParseError("run_index must be >= 1, got " +
                                 std::to_string(entry.run_index),
                             line_no);
        entry.energy_j = detail::parse_double_field(fields[6], "energy_j", line_no);
        if (entry.energy_j < 0.0) throw ParseError("energy_j must be non-negative", line_no);
        log.entries.push_back(std::move(entry));
    }
    return log;
}

std::map<JobKey, double> average_energy(const EnergyLog& log, RunPolicy policy) {
    // Runs are keyed by index first, which makes the mean independent of the
    // order entries appear in the log.
    std::map<JobKey, std::map<int, double>> runs;
    for (const EnergyLogEntry& entry : log.entries) {
        if (policy == RunPolicy::kExactlyThree && entry.run_index > 3)
            throw Error("job " + job_key_to_string(entry.key) + " has run_index " +
                        std::to_string(entry.run_index) + ", want 1..3");
        if (!runs[entry.key].emplace(entry.run_index, entry.energy_j).second)
            throw Error("job " + job_key_to_string(entry.key) + " repeats run_index " +
                        std::to_string(entry.run_index));
    }

    std::map<JobKey, double> averaged;
    for (const auto& [key, by_run] : runs) {
        if (policy == RunPolicy::kExactlyThree && by_run.size() != 3)
            throw Error("job " + job_key_to_string(key) + " has " +
                        std::to_string(by_run.size()) + " run(s), want exactly 3");
        double sum = 0.0;
        for (const auto& [run_index, energy] : by_run) sum += energy;
        averaged.emplace(key, sum / static_cast<double>(by_run.size()));
    }
    return averaged;
}

MeasurementTable merge_energy(const MeasurementTable& table,
                              const std::map<JobKey, double>& decode_energy) {
    for (const auto& [key, energy] : decode_energy) {
        if (key.stage != Stage::kDecode)
            throw Error("energy key " + job_key_to_string(key) +
                        " is not a decode-stage measurement");
        if (table.find(key.sequence_id, key.bitrate_kbps, key.height_px,
                       key.framerate_fps) == nullptr)
            throw Error("energy key " + job_key_to_string(key) +
                        " does not match any measurement");
    }

    MeasurementTable merged(table.ladder());
    for (const auto& [key, rec] : table.records()) {
        MeasurementRecord copy = rec;
        auto it = decode_energy.find(JobKey{rec.sequence_id, rec.bitrate_kbps,
                                            rec.height_px, rec.framerate_fps,
                                            Stage::kDecode});
        if (it != decode_energy.end()) copy.decode_energy_j = it->second;
        merged.insert(std::move(copy));
    }
    return merged;
}

}  // namespace vfropt
