// Command-line front end: framerate selection sweeps, ladder evaluation
// reports, plot-data curves, pipeline job plans, synthetic fixtures and
// energy-log merging, all over the measurement CSV/JSON formats.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vfropt/bd.hpp"
#include "vfropt/errors.hpp"
#include "vfropt/ladder.hpp"
#include "vfropt/measurements.hpp"
#include "vfropt/pipeline.hpp"
#include "vfropt/report.hpp"
#include "vfropt/selection.hpp"
#include "vfropt/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitUsageError = 2;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw vfropt::Error("cannot open '" + path + "' for reading");
    return in;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw vfropt::Error("cannot open '" + path + "' for writing");
    out << content;
}

vfropt::MeasurementFormat format_from_path(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    if (ext == ".csv") return vfropt::MeasurementFormat::kCsv;
    if (ext == ".json") return vfropt::MeasurementFormat::kJson;
    throw vfropt::Error("cannot infer measurements format from '" + path +
                        "' (want .csv or .json)");
}

vfropt::Ladder load_ladder(const std::string& path) {
    if (path.empty()) return vfropt::default_ladder();
    auto in = open_input(path);
    return vfropt::load_ladder_json(in);
}

vfropt::MeasurementTable load_measurements(const std::string& path,
                                           const vfropt::Ladder& ladder) {
    auto in = open_input(path);
    return vfropt::parse_measurements(in, format_from_path(path), ladder);
}

std::string serialize_table(const vfropt::MeasurementTable& table,
                            vfropt::MeasurementFormat format) {
    std::ostringstream out;
    vfropt::serialize_measurements(table, format, out);
    return out.str();
}

vfropt::ReportFormat report_format(const std::string& format_flag,
                                   const std::string& out_path) {
    std::string token = format_flag;
    if (token.empty()) {
        std::string ext = std::filesystem::path(out_path).extension().string();
        if (ext == ".csv") token = "csv";
        else if (ext == ".md") token = "md";
        else token = "json";
    }
    if (token == "json") return vfropt::ReportFormat::kJson;
    if (token == "csv") return vfropt::ReportFormat::kCsv;
    if (token == "md") return vfropt::ReportFormat::kMarkdown;
    throw vfropt::Error("unknown report format '" + token + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable-framerate selection and evaluation for bitrate ladders"};
    app.require_subcommand(1);
    int exit_code = kExitOk;

    // validate ----------------------------------------------------------
    std::string v_measurements, v_ladder;
    auto* validate = app.add_subcommand(
        "validate", "Check a measurement table for missing grid cells");
    validate->add_option("--measurements", v_measurements, "Measurements CSV/JSON")
        ->required();
    validate->add_option("--ladder", v_ladder, "Ladder config JSON (default: built-in)");
    validate->callback([&] {
        auto ladder = load_ladder(v_ladder);
        auto table = load_measurements(v_measurements, ladder);
        auto missing = vfropt::validate_completeness(table);
        for (const auto& cell : missing) {
            std::cout << cell.sequence_id << ',' << cell.bitrate_kbps << ','
                      << cell.height_px << ',' << cell.framerate_fps << '\n';
        }
        std::cout << missing.size() << " missing\n";
        if (!missing.empty()) exit_code = kExitDataError;
    });

    // select ------------------------------------------------------------
    std::string s_measurements, s_ladder, s_selector = "decodra", s_out;
    std::vector<double> s_thresholds;
    auto* select = app.add_subcommand("select", "Run a framerate selection sweep");
    select->add_option("--measurements", s_measurements, "Measurements CSV/JSON")
        ->required();
    select->add_option("--ladder", s_ladder, "Ladder config JSON (default: built-in)");
    select->add_option("--selector", s_selector, "decodra|default|hq")
        ->check(CLI::IsMember({"decodra", "default", "hq"}));
    select
        ->add_option("--thresholds", s_thresholds,
                     "Degradation thresholds (default: ladder thresholds)")
        ->delimiter(',');
    select->add_option("--out", s_out, "Output CSV path (default: stdout)");
    select->callback([&] {
        auto ladder = load_ladder(s_ladder);
        auto table = load_measurements(s_measurements, ladder);
        std::vector<double> thresholds =
            s_thresholds.empty() ? ladder.thresholds : s_thresholds;
        auto results =
            vfropt::sweep(table, vfropt::selector_from_name(s_selector), thresholds);
        std::ostringstream out;
        vfropt::write_selection_csv(results, out);
        write_output(s_out, out.str());
    });

    // report -------------------------------------------------------------
    std::string r_measurements, r_ladder, r_out, r_format, r_averaging = "per-sequence";
    unsigned r_workers = 0;
    auto* report = app.add_subcommand(
        "report", "Evaluate hq and decodra against the default 60 fps ladder");
    report->add_option("--measurements", r_measurements, "Measurements CSV/JSON")
        ->required();
    report->add_option("--ladder", r_ladder, "Ladder config JSON (default: built-in)");
    report->add_option("--out", r_out, "Output path (default: stdout)");
    report->add_option("--format", r_format, "json|csv|md (default: from extension)")
        ->check(CLI::IsMember({"json", "csv", "md"}));
    report
        ->add_option("--curve-averaging", r_averaging,
                     "BD aggregation: per-sequence BD averaged, or BD of mean curves")
        ->check(CLI::IsMember({"per-sequence", "mean-curve"}));
    report->add_option("--workers", r_workers, "Worker threads (0 = hardware)");
    report->callback([&] {
        auto ladder = load_ladder(r_ladder);
        auto table = load_measurements(r_measurements, ladder);
        vfropt::ReportOptions options;
        options.averaging = r_averaging == "mean-curve"
                                ? vfropt::CurveAveraging::kMeanCurveBd
                                : vfropt::CurveAveraging::kPerSequenceBd;
        options.max_workers = r_workers;
        auto doc = vfropt::build_report_document(table, options);
        write_output(r_out, vfropt::render_report(doc, report_format(r_format, r_out)));
    });

    // curves --------------------------------------------------------------
    std::string c_measurements, c_ladder, c_selector = "decodra", c_axis = "bitrate";
    std::string c_aggregate = "mean", c_sequence, c_out;
    double c_threshold = 0.0;
    auto* curves = app.add_subcommand("curves", "Emit plot data for one selector");
    curves->add_option("--measurements", c_measurements, "Measurements CSV/JSON")
        ->required();
    curves->add_option("--ladder", c_ladder, "Ladder config JSON (default: built-in)");
    curves->add_option("--selector", c_selector, "decodra|default|hq")
        ->check(CLI::IsMember({"decodra", "default", "hq"}));
    curves->add_option("--threshold", c_threshold,
                       "Degradation threshold (decodra only, default 0)");
    curves->add_option("--axis", c_axis, "bitrate|energy")
        ->check(CLI::IsMember({"bitrate", "energy"}));
    curves->add_option("--aggregate", c_aggregate, "mean|per-sequence")
        ->check(CLI::IsMember({"mean", "per-sequence"}));
    curves->add_option("--sequence", c_sequence, "Restrict to one sequence id");
    curves->add_option("--out", c_out, "Output CSV path (default: stdout)");
    curves->callback([&] {
        auto ladder = load_ladder(c_ladder);
        auto table = load_measurements(c_measurements, ladder);
        auto selector = vfropt::selector_from_name(c_selector);
        std::vector<double> thresholds = {c_threshold};
        auto results = vfropt::sweep(table, selector, thresholds);
        if (!c_sequence.empty()) {
            std::erase_if(results, [&](const vfropt::SelectionResult& r) {
                return r.sequence_id != c_sequence;
            });
            if (results.empty())
                throw vfropt::Error("no results for sequence '" + c_sequence + "'");
        }
        auto axis = c_axis == "bitrate" ? vfropt::XAxisKind::kBitrateKbps
                                        : vfropt::XAxisKind::kDecodeEnergyJ;
        auto aggregate = c_aggregate == "per-sequence"
                             ? vfropt::CurveAggregate::kPerSequence
                             : vfropt::CurveAggregate::kMeanOverSequences;
        auto curve = vfropt::curve_from_selections(results, axis, aggregate);
        std::ostringstream out;
        vfropt::write_curve_csv(curve, out);
        write_output(c_out, out.str());
    });

    // plan ----------------------------------------------------------------
    std::string p_ladder, p_templates, p_out;
    std::vector<std::string> p_sequences;
    auto* plan = app.add_subcommand("plan", "Emit the measurement pipeline job plan");
    plan->add_option("--ladder", p_ladder, "Ladder config JSON (default: built-in)");
    plan->add_option("--sequences", p_sequences, "Sequence ids (comma separated)")
        ->required()
        ->delimiter(',');
    plan->add_option("--templates", p_templates, "Stage command templates JSON")
        ->required();
    plan->add_option("--out", p_out, "Output JSON path (default: stdout)");
    plan->callback([&] {
        auto ladder = load_ladder(p_ladder);
        auto in = open_input(p_templates);
        auto templates = vfropt::load_templates_json(in);
        auto job_plan = vfropt::build_plan(p_sequences, ladder, templates);
        write_output(p_out, vfropt::plan_to_json(job_plan));
    });

    // synth ---------------------------------------------------------------
    std::string y_model, y_ladder, y_out;
    int y_sequences = 1;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic measurement table");
    synth->add_option("--model", y_model, "Synthetic model JSON")->required();
    synth->add_option("--ladder", y_ladder, "Ladder config JSON (default: built-in)");
    synth->add_option("--sequences", y_sequences, "Number of sequences")
        ->check(CLI::PositiveNumber);
    synth->add_option("--out", y_out, "Output measurements path (default: stdout CSV)");
    synth->callback([&] {
        auto ladder = load_ladder(y_ladder);
        auto in = open_input(y_model);
        auto model = vfropt::load_model_json(in);
        auto table = vfropt::generate(model, ladder, y_sequences);
        auto format = y_out.empty() || y_out == "-" ? vfropt::MeasurementFormat::kCsv
                                                    : format_from_path(y_out);
        write_output(y_out, serialize_table(table, format));
    });

    // merge-energy ----------------------------------------------------------
    std::string m_measurements, m_ladder, m_log, m_out;
    bool m_relax = false;
    auto* merge = app.add_subcommand(
        "merge-energy", "Average an energy log and fold decode energies into a table");
    merge->add_option("--measurements", m_measurements, "Measurements CSV/JSON")
        ->required();
    merge->add_option("--ladder", m_ladder, "Ladder config JSON (default: built-in)");
    merge->add_option("--energy-log", m_log, "Energy log CSV")->required();
    merge->add_flag("--relax-runs", m_relax,
                    "Accept any run count >= 1 instead of exactly 3");
    merge->add_option("--out", m_out, "Output measurements path (default: stdout CSV)");
    merge->callback([&] {
        auto ladder = load_ladder(m_ladder);
        auto table = load_measurements(m_measurements, ladder);
        auto in = open_input(m_log);
        auto log = vfropt::parse_energy_log_csv(in);
        auto averaged = vfropt::average_energy(
            log, m_relax ? vfropt::RunPolicy::kAtLeastOne
                         : vfropt::RunPolicy::kExactlyThree);
        std::map<vfropt::JobKey, double> decode_only;
        for (const auto& [key, energy] : averaged) {
            if (key.stage == vfropt::Stage::kDecode) decode_only.emplace(key, energy);
        }
        auto merged = vfropt::merge_energy(table, decode_only);
        auto format = m_out.empty() || m_out == "-" ? vfropt::MeasurementFormat::kCsv
                                                    : format_from_path(m_out);
        write_output(m_out, serialize_table(merged, format));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsageError;
    } catch (const vfropt::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDataError;
    }
    return exit_code;
}
