#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vfropt/ladder.hpp"
#include "vfropt/measurements.hpp"

namespace vfropt {

// One evaluated method against the default (60 fps) reference.
// delta_e_enc_pct is shared across methods: it compares the cost of encoding
// every framerate rendition against encoding the 60 fps renditions only,
// which is what producing any framerate-optimized ladder by exhaustive
// measurement costs. It is absent when the table carries no encoding energy.
struct ReportRow {
    std::string method;  // "hq" or "decodra"
    std::optional<double> threshold;  // VMAF points; empty for hq
    double bd_psnr_db = 0.0;
    double bd_vmaf = 0.0;
    std::optional<double> delta_e_enc_pct;
    double delta_e_dec_pct = 0.0;
    double bdde_psnr_pct = 0.0;
    double bdde_vmaf_pct = 0.0;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

// Aggregate evaluation: one hq row followed by one decodra row per ladder
// threshold, in ascending threshold order. The default selection is the
// implicit reference and has no row.
struct EvaluationReport {
    std::vector<ReportRow> rows;

    friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

// Per-rung quality sacrifice and energy gain of decodra against the hq
// baseline, averaged over sequences.
struct RungDelta {
    Representation rung;
    double vmaf_decrease = 0.0;               // VMAF_hq - VMAF_decodra
    double decode_energy_reduction_pct = 0.0; // 100 * (E_hq - E_decodra) / E_hq

    friend bool operator==(const RungDelta&, const RungDelta&) = default;
};

// BD aggregation across sequences: compute BD per sequence and average the
// values (kPerSequenceBd), or average the per-rung curves over sequences
// first and compute one BD on the mean curves (kMeanCurveBd).
enum class CurveAveraging { kPerSequenceBd, kMeanCurveBd };

struct ReportOptions {
    CurveAveraging averaging = CurveAveraging::kPerSequenceBd;
    // Per-sequence BD work may run on this many threads; results are reduced
    // in sequence order, so the output never depends on the worker count.
    unsigned max_workers = 0;  // 0 = hardware concurrency
};

// Evaluates hq and decodra (at every ladder threshold) against the default
// selection. Per sequence and method, rate-quality and energy-quality curves
// are built from the selected renditions, Pareto-filtered, and compared via
// bd_quality/bdde; energy deltas are total-sum over all (sequence, rung)
// keys. Requires a complete table. Errors carry method/threshold context.
EvaluationReport build_report(const MeasurementTable& table,
                              const ReportOptions& options = {});

// Per rung: mean over sequences of the VMAF decrease and the decoding energy
// reduction of decodra at `threshold` relative to hq. Ordered by bitrate.
// Throws Error on an incomplete table or zero hq decoding energy.
std::vector<RungDelta> rung_deltas(const MeasurementTable& table, double threshold);

// The full report artifact: the evaluation table plus the per-rung deltas
// for every ladder threshold.
struct ReportDocument {
    EvaluationReport evaluation;
    std::vector<std::pair<double, std::vector<RungDelta>>> rung_deltas;
};

ReportDocument build_report_document(const MeasurementTable& table,
                                     const ReportOptions& options = {});

enum class ReportFormat { kJson, kCsv, kMarkdown };

// Deterministic rendering: stable ordering and fixed 4-decimal float
// formatting, so equal inputs produce byte-identical output.
//
// JSON: { "reference": "default", "rows": [...], "rung_deltas": [...] }
// CSV: the rows table, then a "# rung_deltas" section.
// Markdown: the evaluation table in Table-II column order, then one rung
// delta table per threshold.
std::string render_report(const ReportDocument& document, ReportFormat format);

}  // namespace vfropt
