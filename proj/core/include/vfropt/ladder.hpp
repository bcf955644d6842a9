#pragma once

#include <compare>
#include <iosfwd>
#include <string>
#include <vector>

namespace vfropt {

// One rung of a bitrate ladder: a target bitrate paired with the vertical
// resolution it is encoded at. Width is not modeled; ladders follow the
// single-number "height" convention of HLS authoring specs.
struct Representation {
    int bitrate_kbps = 0;
    int height_px = 0;

    friend auto operator<=>(const Representation&, const Representation&) = default;
};

// Candidate framerates offered per rung, strictly increasing.
struct FramerateSet {
    std::vector<int> values;

    bool contains(int fps) const;
    int max_fps() const;  // requires non-empty

    friend bool operator==(const FramerateSet&, const FramerateSet&) = default;
};

// A full ladder configuration: rungs ordered by strictly increasing bitrate,
// the framerate candidates, and the quality degradation thresholds (VMAF
// points) a selection sweep should evaluate.
struct Ladder {
    std::vector<Representation> rungs;
    FramerateSet framerates;
    std::vector<double> thresholds;

    // nullptr when the (bitrate, height) pair is not a rung of this ladder.
    const Representation* find_rung(int bitrate_kbps, int height_px) const;

    friend bool operator==(const Ladder&, const Ladder&) = default;
};

// Throws Error on any invariant violation:
//   - rungs non-empty, bitrates strictly increasing and positive, heights > 0
//   - framerates non-empty, strictly increasing, all > 0
//   - thresholds strictly increasing, all >= 0
void validate_ladder(const Ladder& ladder);

// The built-in 12-rung HLS authoring ladder (145 kbps @ 360p up to
// 16800 kbps @ 2160p) with framerates {24, 30, 48, 60} and thresholds
// {1, 2, 4, 6}.
Ladder default_ladder();

// Ladder config JSON:
//   { "rungs": [{"bitrate_kbps":145,"height_px":360}, ...],
//     "framerates_fps": [24,30,48,60],
//     "thresholds": [1,2,4,6] }
// Loading validates the result; saving emits the same schema.
Ladder load_ladder_json(std::istream& in);
void save_ladder_json(const Ladder& ladder, std::ostream& out);

}  // namespace vfropt
