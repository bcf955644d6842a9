#include "vfropt/ladder.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "vfropt/errors.hpp"

namespace vfropt {

bool FramerateSet::contains(int fps) const {
    return std::binary_search(values.begin(), values.end(), fps);
}

int FramerateSet::max_fps() const {
    if (values.empty()) throw Error("framerate set is empty");
    return values.back();
}

const Representation* Ladder::find_rung(int bitrate_kbps, int height_px) const {
    for (const Representation& rung : rungs) {
        if (rung.bitrate_kbps == bitrate_kbps && rung.height_px == height_px) return &rung;
    }
    return nullptr;
}

void validate_ladder(const Ladder& ladder) {
    if (ladder.rungs.empty()) throw Error("ladder has no rungs");
    for (const Representation& rung : ladder.rungs) {
        if (rung.bitrate_kbps <= 0)
            throw Error("rung bitrate_kbps must be positive, got " +
                        std::to_string(rung.bitrate_kbps));
        if (rung.height_px <= 0)
            throw Error("rung height_px must be positive, got " +
                        std::to_string(rung.height_px));
    }
    for (std::size_t i = 1; i < ladder.rungs.size(); ++i) {
        if (ladder.rungs[i].bitrate_kbps <= ladder.rungs[i - 1].bitrate_kbps)
            throw Error("rung bitrates must be strictly increasing");
    }
    if (ladder.framerates.values.empty()) throw Error("framerate set is empty");
    for (int fps : ladder.framerates.values) {
        if (fps <= 0) throw Error("framerates must be positive, got " + std::to_string(fps));
    }
    for (std::size_t i = 1; i < ladder.framerates.values.size(); ++i) {
        if (ladder.framerates.values[i] <= ladder.framerates.values[i - 1])
            throw Error("framerates must be strictly increasing");
    }
    for (double t : ladder.thresholds) {
        if (t < 0.0) throw Error("thresholds must be non-negative");
    }
    for (std::size_t i = 1; i < ladder.thresholds.size(); ++i) {
        if (ladder.thresholds[i] <= ladder.thresholds[i - 1])
            throw Error("thresholds must be strictly increasing");
    }
}

Ladder default_ladder() {
    Ladder ladder;
    ladder.rungs = {
        {145, 360},   {300, 432},   {600, 540},   {900, 540},
        {1600, 540},  {2400, 720},  {3400, 720},  {4500, 1080},
        {5800, 1080}, {8100, 1440}, {11600, 2160}, {16800, 2160},
    };
    ladder.framerates.values = {24, 30, 48, 60};
    ladder.thresholds = {1.0, 2.0, 4.0, 6.0};
    return ladder;
}

Ladder load_ladder_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid ladder JSON: ") + e.what(), 0);
    }
    Ladder ladder;
    try {
        for (const auto& rung : doc.at("rungs")) {
            ladder.rungs.push_back({rung.at("bitrate_kbps").get<int>(),
                                    rung.at("height_px").get<int>()});
        }
        ladder.framerates.values = doc.at("framerates_fps").get<std::vector<int>>();
        ladder.thresholds = doc.at("thresholds").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid ladder JSON: ") + e.what(), 0);
    }
    validate_ladder(ladder);
    return ladder;
}

void save_ladder_json(const Ladder& ladder, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["rungs"] = nlohmann::ordered_json::array();
    for (const Representation& rung : ladder.rungs) {
        doc["rungs"].push_back({{"bitrate_kbps", rung.bitrate_kbps},
                                {"height_px", rung.height_px}});
    }
    doc["framerates_fps"] = ladder.framerates.values;
    doc["thresholds"] = ladder.thresholds;
    out << doc.dump(2) << '\n';
}

}  // namespace vfropt
