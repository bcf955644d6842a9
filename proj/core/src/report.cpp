#include "vfropt/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "vfropt/bd.hpp"
#include "vfropt/errors.hpp"
#include "vfropt/selection.hpp"

namespace vfropt {

namespace {

enum class QualityKind { kVmaf, kPsnr };

QualityByFramerate quality_by_framerate(const MeasurementTable& table,
                                        const std::string& sequence_id,
                                        const Representation& rung) {
    QualityByFramerate q;
    for (int fps : table.ladder().framerates.values) {
        const MeasurementRecord* rec =
            table.find(sequence_id, rung.bitrate_kbps, rung.height_px, fps);
        if (rec) q.emplace(fps, rec->vmaf);
    }
    return q;
}

// The records a selector picks for one sequence, aligned with ladder rungs.
std::vector<const MeasurementRecord*> select_records(const MeasurementTable& table,
                                                     const std::string& sequence_id,
                                                     Selector selector, double threshold) {
    std::vector<const MeasurementRecord*> records;
    records.reserve(table.ladder().rungs.size());
    for (const Representation& rung : table.ladder().rungs) {
        QualityByFramerate q = quality_by_framerate(table, sequence_id, rung);
        int fps = 0;
        switch (selector) {
            case Selector::kDecodra: fps = select_framerate(q, threshold); break;
            case Selector::kDefault: fps = select_default(table.ladder()); break;
            case Selector::kHq: fps = select_hq(q); break;
        }
        records.push_back(table.find(sequence_id, rung.bitrate_kbps, rung.height_px, fps));
    }
    return records;
}

double quality_of(const MeasurementRecord& rec, QualityKind kind) {
    return kind == QualityKind::kVmaf ? rec.vmaf : rec.psnr_db;
}

RdCurve rate_curve(const std::vector<const MeasurementRecord*>& records, QualityKind kind) {
    RdCurve curve;
    curve.x_kind = XAxisKind::kBitrateKbps;
    for (const MeasurementRecord* rec : records) {
        curve.points.push_back(
            {static_cast<double>(rec->bitrate_kbps), quality_of(*rec, kind)});
    }
    return pareto_filter(curve);
}

RdCurve energy_curve(const std::vector<const MeasurementRecord*>& records,
                     QualityKind kind) {
    RdCurve curve;
    curve.x_kind = XAxisKind::kDecodeEnergyJ;
    for (const MeasurementRecord* rec : records) {
        curve.points.push_back({rec->decode_energy_j, quality_of(*rec, kind)});
    }
    return pareto_filter(curve);
}

struct BdSet {
    double bd_psnr_db = 0.0;
    double bd_vmaf = 0.0;
    double bdde_psnr_pct = 0.0;
    double bdde_vmaf_pct = 0.0;
};

BdSet bd_against_reference(const std::vector<const MeasurementRecord*>& reference,
                           const std::vector<const MeasurementRecord*>& test) {
    BdSet out;
    out.bd_psnr_db = bd_quality(rate_curve(reference, QualityKind::kPsnr),
                                rate_curve(test, QualityKind::kPsnr))
                         .value;
    out.bd_vmaf = bd_quality(rate_curve(reference, QualityKind::kVmaf),
                             rate_curve(test, QualityKind::kVmaf))
                      .value;
    out.bdde_psnr_pct = bdde(energy_curve(reference, QualityKind::kPsnr),
                             energy_curve(test, QualityKind::kPsnr))
                            .value;
    out.bdde_vmaf_pct = bdde(energy_curve(reference, QualityKind::kVmaf),
                             energy_curve(test, QualityKind::kVmaf))
                            .value;
    return out;
}

struct Method {
    std::string name;
    std::optional<double> threshold;
    Selector selector;
};

std::vector<Method> method_list(const Ladder& ladder) {
    std::vector<Method> methods;
    methods.push_back({"hq", std::nullopt, Selector::kHq});
    for (double t : ladder.thresholds) {
        methods.push_back({"decodra", t, Selector::kDecodra});
    }
    return methods;
}

std::string method_context(const Method& method) {
    if (!method.threshold) return "method " + method.name;
    std::ostringstream out;
    out << "method " << method.name << " (threshold " << *method.threshold << ")";
    return out.str();
}

void require_complete(const MeasurementTable& table) {
    auto missing = validate_completeness(table);
    if (!missing.empty())
        throw Error("table is incomplete (" + std::to_string(missing.size()) +
                    " missing cells); run validation for the full list");
}

std::string rung_key(const std::string& sequence_id, const Representation& rung) {
    return sequence_id + "|" + std::to_string(rung.bitrate_kbps) + "|" +
           std::to_string(rung.height_px);
}

// Encoding-energy overhead of measuring every framerate rendition instead of
// only the 60 fps one. Shared by every method row. Absent when the table has
// no encoding energy at all; partial columns are an error.
std::optional<double> encode_energy_delta(const MeasurementTable& table,
                                          const std::vector<std::string>& sequences) {
    const Ladder& ladder = table.ladder();
    std::size_t with = 0, without = 0;
    for (const std::string& seq : sequences) {
        for (const Representation& rung : ladder.rungs) {
            for (int fps : ladder.framerates.values) {
                const MeasurementRecord* rec =
                    table.find(seq, rung.bitrate_kbps, rung.height_px, fps);
                if (rec->encode_energy_j) ++with; else ++without;
            }
        }
    }
    if (with == 0) return std::nullopt;
    if (without > 0)
        throw Error("column 'encode_energy_j' is present for only " +
                    std::to_string(with) + " of " + std::to_string(with + without) +
                    " grid records");

    std::vector<std::pair<std::string, double>> ref, test;
    for (const std::string& seq : sequences) {
        for (const Representation& rung : ladder.rungs) {
            double all_framerates = 0.0;
            for (int fps : ladder.framerates.values) {
                all_framerates += *table.find(seq, rung.bitrate_kbps, rung.height_px, fps)
                                       ->encode_energy_j;
            }
            const MeasurementRecord* at_default = table.find(
                seq, rung.bitrate_kbps, rung.height_px, select_default(ladder));
            ref.emplace_back(rung_key(seq, rung), *at_default->encode_energy_j);
            test.emplace_back(rung_key(seq, rung), all_framerates);
        }
    }
    return delta_energy(ref, test);
}

// Runs fn(i) for i in [0, n) on up to max_workers threads, storing nothing
// itself; fn writes into pre-sized slots so the reduction order is fixed.
template <typename Fn>
void parallel_for(std::size_t n, unsigned max_workers, Fn&& fn) {
    unsigned workers = max_workers == 0 ? std::thread::hardware_concurrency() : max_workers;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));

    std::vector<std::exception_ptr> errors(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto run = [&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
        for (std::thread& t : pool) t.join();
    }
    // First failure in sequence order, so errors are as deterministic as
    // results.
    for (const std::exception_ptr& err : errors) {
        if (err) std::rethrow_exception(err);
    }
}

}  // namespace

EvaluationReport build_report(const MeasurementTable& table, const ReportOptions& options) {
    require_complete(table);
    const Ladder& ladder = table.ladder();
    const std::vector<std::string> sequences = table.sequences();
    if (sequences.empty()) throw Error("table has no sequences");
    select_default(ladder);  // the reference needs 60 fps in the ladder

    const std::vector<Method> methods = method_list(ladder);
    const std::optional<double> enc_delta = encode_energy_delta(table, sequences);

    // Per sequence: the default reference selection plus every method's.
    std::vector<std::vector<const MeasurementRecord*>> default_recs(sequences.size());
    std::vector<std::vector<std::vector<const MeasurementRecord*>>> method_recs(
        sequences.size());
    std::vector<std::vector<BdSet>> per_sequence_bd(sequences.size());

    const bool per_sequence = options.averaging == CurveAveraging::kPerSequenceBd;
    parallel_for(sequences.size(), options.max_workers, [&](std::size_t s) {
        const std::string& seq = sequences[s];
        default_recs[s] = select_records(table, seq, Selector::kDefault, 0.0);
        method_recs[s].resize(methods.size());
        per_sequence_bd[s].resize(methods.size());
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const Method& method = methods[m];
            method_recs[s][m] = select_records(table, seq, method.selector,
                                               method.threshold.value_or(0.0));
            if (per_sequence) {
                try {
                    per_sequence_bd[s][m] =
                        bd_against_reference(default_recs[s], method_recs[s][m]);
                } catch (const Error& e) {
                    throw Error(method_context(method) + ", sequence " + seq + ": " +
                                e.what());
                }
            }
        }
    });

    EvaluationReport report;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        const Method& method = methods[m];
        ReportRow row;
        row.method = method.name;
        row.threshold = method.threshold;
        row.delta_e_enc_pct = enc_delta;

        BdSet bd;
        if (per_sequence) {
            for (std::size_t s = 0; s < sequences.size(); ++s) {
                bd.bd_psnr_db += per_sequence_bd[s][m].bd_psnr_db;
                bd.bd_vmaf += per_sequence_bd[s][m].bd_vmaf;
                bd.bdde_psnr_pct += per_sequence_bd[s][m].bdde_psnr_pct;
                bd.bdde_vmaf_pct += per_sequence_bd[s][m].bdde_vmaf_pct;
            }
            double n = static_cast<double>(sequences.size());
            bd.bd_psnr_db /= n;
            bd.bd_vmaf /= n;
            bd.bdde_psnr_pct /= n;
            bd.bdde_vmaf_pct /= n;
        } else {
            // Mean-curve variant: average the per-rung measurements over
            // sequences first, then compute one BD on the mean curves.
            std::vector<MeasurementRecord> ref_mean(ladder.rungs.size());
            std::vector<MeasurementRecord> test_mean(ladder.rungs.size());
            double n = static_cast<double>(sequences.size());
            for (std::size_t r = 0; r < ladder.rungs.size(); ++r) {
                ref_mean[r].bitrate_kbps = ladder.rungs[r].bitrate_kbps;
                test_mean[r].bitrate_kbps = ladder.rungs[r].bitrate_kbps;
                for (std::size_t s = 0; s < sequences.size(); ++s) {
                    ref_mean[r].vmaf += default_recs[s][r]->vmaf / n;
                    ref_mean[r].psnr_db += default_recs[s][r]->psnr_db / n;
                    ref_mean[r].decode_energy_j += default_recs[s][r]->decode_energy_j / n;
                    test_mean[r].vmaf += method_recs[s][m][r]->vmaf / n;
                    test_mean[r].psnr_db += method_recs[s][m][r]->psnr_db / n;
                    test_mean[r].decode_energy_j +=
                        method_recs[s][m][r]->decode_energy_j / n;
                }
            }
            std::vector<const MeasurementRecord*> ref_ptrs, test_ptrs;
            for (std::size_t r = 0; r < ladder.rungs.size(); ++r) {
                ref_ptrs.push_back(&ref_mean[r]);
                test_ptrs.push_back(&test_mean[r]);
            }
            try {
                bd = bd_against_reference(ref_ptrs, test_ptrs);
            } catch (const Error& e) {
                throw Error(method_context(method) + ": " + e.what());
            }
        }
        row.bd_psnr_db = bd.bd_psnr_db;
        row.bd_vmaf = bd.bd_vmaf;
        row.bdde_psnr_pct = bd.bdde_psnr_pct;
        row.bdde_vmaf_pct = bd.bdde_vmaf_pct;

        std::vector<std::pair<std::string, double>> ref_energy, test_energy;
        for (std::size_t s = 0; s < sequences.size(); ++s) {
            for (std::size_t r = 0; r < ladder.rungs.size(); ++r) {
                std::string key = rung_key(sequences[s], ladder.rungs[r]);
                ref_energy.emplace_back(key, default_recs[s][r]->decode_energy_j);
                test_energy.emplace_back(std::move(key),
                                         method_recs[s][m][r]->decode_energy_j);
            }
        }
        try {
            row.delta_e_dec_pct = delta_energy(ref_energy, test_energy);
        } catch (const Error& e) {
            throw Error(method_context(method) + ": " + e.what());
        }

        report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<RungDelta> rung_deltas(const MeasurementTable& table, double threshold) {
    require_complete(table);
    const Ladder& ladder = table.ladder();
    const std::vector<std::string> sequences = table.sequences();
    if (sequences.empty()) throw Error("table has no sequences");

    std::vector<RungDelta> deltas;
    deltas.reserve(ladder.rungs.size());
    for (const Representation& rung : ladder.rungs) deltas.push_back({rung, 0.0, 0.0});

    for (const std::string& seq : sequences) {
        auto hq_recs = select_records(table, seq, Selector::kHq, 0.0);
        auto dec_recs = select_records(table, seq, Selector::kDecodra, threshold);
        for (std::size_t r = 0; r < ladder.rungs.size(); ++r) {
            if (hq_recs[r]->decode_energy_j <= 0.0)
                throw Error("hq decoding energy is zero for sequence " + seq + " at " +
                            std::to_string(ladder.rungs[r].bitrate_kbps) + " kbps");
            deltas[r].vmaf_decrease += hq_recs[r]->vmaf - dec_recs[r]->vmaf;
            deltas[r].decode_energy_reduction_pct +=
                100.0 * (hq_recs[r]->decode_energy_j - dec_recs[r]->decode_energy_j) /
                hq_recs[r]->decode_energy_j;
        }
    }
    double n = static_cast<double>(sequences.size());
    for (RungDelta& d : deltas) {
        d.vmaf_decrease /= n;
        d.decode_energy_reduction_pct /= n;
    }
    return deltas;
}

ReportDocument build_report_document(const MeasurementTable& table,
                                     const ReportOptions& options) {
    ReportDocument doc;
    doc.evaluation = build_report(table, options);
    for (double threshold : table.ladder().thresholds) {
        doc.rung_deltas.emplace_back(threshold, rung_deltas(table, threshold));
    }
    return doc;
}

namespace {

std::string fmt4(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    std::string out(buf);
    if (out == "-0.0000") out = "0.0000";
    return out;
}

std::string render_json(const ReportDocument& doc) {
    std::ostringstream out;
    out << "{\n  \"reference\": \"default\",\n  \"rows\": [\n";
    for (std::size_t i = 0; i < doc.evaluation.rows.size(); ++i) {
        const ReportRow& row = doc.evaluation.rows[i];
        out << "    {\"method\": \"" << row.method << "\", \"threshold\": "
            << (row.threshold ? fmt4(*row.threshold) : std::string("null"))
            << ", \"bd_psnr_db\": " << fmt4(row.bd_psnr_db)
            << ", \"bd_vmaf\": " << fmt4(row.bd_vmaf) << ", \"delta_e_enc_pct\": "
            << (row.delta_e_enc_pct ? fmt4(*row.delta_e_enc_pct) : std::string("null"))
            << ", \"delta_e_dec_pct\": " << fmt4(row.delta_e_dec_pct)
            << ", \"bdde_psnr_pct\": " << fmt4(row.bdde_psnr_pct)
            << ", \"bdde_vmaf_pct\": " << fmt4(row.bdde_vmaf_pct) << "}"
            << (i + 1 < doc.evaluation.rows.size() ? "," : "") << "\n";
    }
    out << "  ],\n  \"rung_deltas\": [\n";
    for (std::size_t t = 0; t < doc.rung_deltas.size(); ++t) {
        const auto& [threshold, deltas] = doc.rung_deltas[t];
        out << "    {\"threshold\": " << fmt4(threshold) << ", \"entries\": [\n";
        for (std::size_t r = 0; r < deltas.size(); ++r) {
            const RungDelta& d = deltas[r];
            out << "      {\"bitrate_kbps\": " << d.rung.bitrate_kbps
                << ", \"height_px\": " << d.rung.height_px
                << ", \"vmaf_decrease\": " << fmt4(d.vmaf_decrease)
                << ", \"decode_energy_reduction_pct\": "
                << fmt4(d.decode_energy_reduction_pct) << "}"
                << (r + 1 < deltas.size() ? "," : "") << "\n";
        }
        out << "    ]}" << (t + 1 < doc.rung_deltas.size() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
    return out.str();
}

std::string render_csv(const ReportDocument& doc) {
    std::ostringstream out;
    out << "method,threshold,bd_psnr_db,bd_vmaf,delta_e_enc_pct,delta_e_dec_pct,"
           "bdde_psnr_pct,bdde_vmaf_pct\n";
    for (const ReportRow& row : doc.evaluation.rows) {
        out << row.method << ',' << (row.threshold ? fmt4(*row.threshold) : std::string())
            << ',' << fmt4(row.bd_psnr_db) << ',' << fmt4(row.bd_vmaf) << ','
            << (row.delta_e_enc_pct ? fmt4(*row.delta_e_enc_pct) : std::string()) << ','
            << fmt4(row.delta_e_dec_pct) << ',' << fmt4(row.bdde_psnr_pct) << ','
            << fmt4(row.bdde_vmaf_pct) << '\n';
    }
    out << "# rung_deltas\n"
           "threshold,bitrate_kbps,height_px,vmaf_decrease,decode_energy_reduction_pct\n";
    for (const auto& [threshold, deltas] : doc.rung_deltas) {
        for (const RungDelta& d : deltas) {
            out << fmt4(threshold) << ',' << d.rung.bitrate_kbps << ',' << d.rung.height_px
                << ',' << fmt4(d.vmaf_decrease) << ','
                << fmt4(d.decode_energy_reduction_pct) << '\n';
        }
    }
    return out.str();
}

std::string render_markdown(const ReportDocument& doc) {
    std::ostringstream out;
    out << "# Coding performance vs. default (60 fps) encoding\n\n";
    out << "| Method | v_J | BD-PSNR [dB] | BD-VMAF | ΔE_enc [%] | ΔE_dec [%] "
           "| BDDE (PSNR) [%] | BDDE (VMAF) [%] |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    for (const ReportRow& row : doc.evaluation.rows) {
        out << "| " << row.method << " | "
            << (row.threshold ? fmt4(*row.threshold) : std::string("-")) << " | "
            << fmt4(row.bd_psnr_db) << " | " << fmt4(row.bd_vmaf) << " | "
            << (row.delta_e_enc_pct ? fmt4(*row.delta_e_enc_pct) : std::string("-"))
            << " | " << fmt4(row.delta_e_dec_pct) << " | " << fmt4(row.bdde_psnr_pct)
            << " | " << fmt4(row.bdde_vmaf_pct) << " |\n";
    }
    out << "\n# Per-rung deltas vs. hq\n";
    for (const auto& [threshold, deltas] : doc.rung_deltas) {
        out << "\n## Threshold " << fmt4(threshold) << "\n\n";
        out << "| Bitrate [kbps] | Height [px] | VMAF decrease | Decode energy "
               "reduction [%] |\n";
        out << "|---|---|---|---|\n";
        for (const RungDelta& d : deltas) {
            out << "| " << d.rung.bitrate_kbps << " | " << d.rung.height_px << " | "
                << fmt4(d.vmaf_decrease) << " | " << fmt4(d.decode_energy_reduction_pct)
                << " |\n";
        }
    }
    return out.str();
}

}  // namespace

std::string render_report(const ReportDocument& document, ReportFormat format) {
    switch (format) {
        case ReportFormat::kJson: return render_json(document);
        case ReportFormat::kCsv: return render_csv(document);
        case ReportFormat::kMarkdown: return render_markdown(document);
    }
    throw Error("unknown report format");
}

}  // namespace vfropt
