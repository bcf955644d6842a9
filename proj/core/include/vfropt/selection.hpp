#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vfropt/ladder.hpp"
#include "vfropt/measurements.hpp"

namespace vfropt {

// Quality (VMAF points) measured per candidate framerate for one rung.
// Ordered by framerate, which makes "smallest feasible framerate" a single
// forward scan.
using QualityByFramerate = std::map<int, double>;

// The framerate every rung falls back to under the fixed-rate baseline.
inline constexpr int kDefaultFramerateFps = 60;

// Pareto-front framerate selection: returns the smallest framerate f whose
// quality is within `degradation_threshold` of the best framerate's quality,
// i.e. max(q) - q[f] <= threshold. Always succeeds on non-empty input (the
// arg-max framerate has gap 0). At threshold 0 this picks the smallest
// framerate attaining the maximum.
// Throws Error on empty q or negative threshold.
int select_framerate(const QualityByFramerate& q, double degradation_threshold);

// Highest-quality baseline: the framerate maximizing quality, ties broken
// toward the smaller framerate (equal decoding cost wins at equal quality).
// Equivalent to select_framerate(q, 0).
int select_hq(const QualityByFramerate& q);

// Fixed-rate baseline: 60 fps. Throws Error when the ladder does not offer
// 60 fps.
int select_default(const Ladder& ladder);

enum class Selector { kDecodra, kDefault, kHq };

std::string_view selector_name(Selector selector);
Selector selector_from_name(std::string_view name);  // throws Error on unknown name

// One selected rendition. threshold is 0 for the default/hq selectors.
struct SelectionResult {
    std::string sequence_id;
    Representation rung;
    double threshold = 0.0;
    Selector selector = Selector::kDecodra;
    int framerate_fps = 0;
    double achieved_quality = 0.0;  // VMAF of the selected rendition
    double decode_energy_j = 0.0;

    friend bool operator==(const SelectionResult&, const SelectionResult&) = default;
};

// Runs the selector over every (sequence, rung) cell of a complete table.
// For the decodra selector one result is produced per threshold; default/hq
// produce one result per cell with threshold recorded as 0. Results are
// ordered by (sequence, bitrate, threshold).
// Throws Error when the table is incomplete (the message lists missing cells).
std::vector<SelectionResult> sweep(const MeasurementTable& table, Selector selector,
                                   std::span<const double> thresholds);

// CSV header:
//   sequence,bitrate_kbps,height_px,threshold,selector,framerate_fps,achieved_quality,decode_energy_j
void write_selection_csv(std::span<const SelectionResult> results, std::ostream& out);

}  // namespace vfropt
