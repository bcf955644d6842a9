#include "vfropt/selection.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "csv_util.hpp"
#include "vfropt/errors.hpp"

namespace vfropt {

int select_framerate(const QualityByFramerate& q, double degradation_threshold) {
    if (q.empty()) throw Error("quality table is empty");
    if (degradation_threshold < 0.0) throw Error("degradation threshold must be >= 0");

    double v_max = 0.0;
    bool first = true;
    for (const auto& [fps, quality] : q) {
        if (first || quality > v_max) v_max = quality;
        first = false;
    }
    // Entries are ordered by framerate, so the first feasible one is the
    // smallest framerate within the degradation threshold.
    for (const auto& [fps, quality] : q) {
        if (v_max - quality <= degradation_threshold) return fps;
    }
    return q.rbegin()->first;  // unreachable: the arg-max entry has gap 0
}

int select_hq(const QualityByFramerate& q) { return select_framerate(q, 0.0); }

int select_default(const Ladder& ladder) {
    if (!ladder.framerates.contains(kDefaultFramerateFps)) {
        throw Error("ladder does not offer " + std::to_string(kDefaultFramerateFps) +
                    " fps, required by the default selector");
    }
    return kDefaultFramerateFps;
}

std::string_view selector_name(Selector selector) {
    switch (selector) {
        case Selector::kDecodra: return "decodra";
        case Selector::kDefault: return "default";
        case Selector::kHq: return "hq";
    }
    throw Error("unknown selector");
}

Selector selector_from_name(std::string_view name) {
    if (name == "decodra") return Selector::kDecodra;
    if (name == "default") return Selector::kDefault;
    if (name == "hq") return Selector::kHq;
    throw Error("unknown selector '" + std::string(name) + "'");
}

namespace {

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

SelectionResult make_result(const MeasurementTable& table, const std::string& sequence_id,
                            const Representation& rung, double threshold,
                            Selector selector, int fps) {
    const MeasurementRecord* rec =
        table.find(sequence_id, rung.bitrate_kbps, rung.height_px, fps);
    // sweep() validated completeness, so the record exists.
    return SelectionResult{sequence_id, rung,      threshold,
                           selector,    fps,       rec->vmaf,
                           rec->decode_energy_j};
}

}  // namespace

std::vector<SelectionResult> sweep(const MeasurementTable& table, Selector selector,
                                   std::span<const double> thresholds) {
    auto missing = validate_completeness(table);
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "table is incomplete, " << missing.size() << " cell(s) missing:";
        std::size_t shown = std::min<std::size_t>(missing.size(), 8);
        for (std::size_t i = 0; i < shown; ++i) {
            const MissingCell& cell = missing[i];
            msg << " (" << cell.sequence_id << ", " << cell.bitrate_kbps << ", "
                << cell.height_px << ", " << cell.framerate_fps << ")";
        }
        if (missing.size() > shown) msg << " ...";
        throw Error(msg.str());
    }

    std::vector<SelectionResult> results;
    for (const std::string& seq : table.sequences()) {
        for (const Representation& rung : table.ladder().rungs) {
            QualityByFramerate q = quality_by_framerate(table, seq, rung);
            switch (selector) {
                case Selector::kDecodra:
                    for (double v_j : thresholds) {
                        int fps = select_framerate(q, v_j);
                        results.push_back(
                            make_result(table, seq, rung, v_j, selector, fps));
                    }
                    break;
                case Selector::kDefault:
                    results.push_back(make_result(table, seq, rung, 0.0, selector,
                                                  select_default(table.ladder())));
                    break;
                case Selector::kHq:
                    results.push_back(
                        make_result(table, seq, rung, 0.0, selector, select_hq(q)));
                    break;
            }
        }
    }
    return results;
}

void write_selection_csv(std::span<const SelectionResult> results, std::ostream& out) {
    out << "sequence,bitrate_kbps,height_px,threshold,selector,framerate_fps,"
           "achieved_quality,decode_energy_j\n";
    for (const SelectionResult& r : results) {
        out << r.sequence_id << ',' << r.rung.bitrate_kbps << ',' << r.rung.height_px << ','
            << detail::format_double(r.threshold) << ',' << selector_name(r.selector) << ','
            << r.framerate_fps << ',' << detail::format_double(r.achieved_quality) << ','
            << detail::format_double(r.decode_energy_j) << '\n';
    }
}

}  // namespace vfropt
