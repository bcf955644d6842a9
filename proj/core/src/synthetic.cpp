#include "vfropt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "vfropt/errors.hpp"

namespace vfropt {

namespace {

constexpr double kReferenceHeightPx = 360.0;
constexpr double kEncodeEnergyFactor = 10.0;  // encode cost per decode joule
constexpr double kPsnrBaseDb = 18.0;
constexpr double kPsnrPerVmafPoint = 0.22;
constexpr double kSsimBase = 0.5;
constexpr double kSsimPerVmafPoint = 0.005;

// splitmix64: platform-independent, so equal seeds give bit-identical
// tables everywhere.
std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform_pm1(std::uint64_t& state) {
    double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;  // [0, 1)
    return 2.0 * u - 1.0;
}

}  // namespace

void validate_model(const SyntheticModel& model, const Ladder& ladder) {
    validate_ladder(ladder);
    if (model.quality_ceiling.size() != ladder.rungs.size())
        throw Error("quality_ceiling has " + std::to_string(model.quality_ceiling.size()) +
                    " entries for " + std::to_string(ladder.rungs.size()) + " rungs");
    for (double c : model.quality_ceiling) {
        if (c < 0.0 || c > 100.0) throw Error("quality_ceiling entries must be in [0,100]");
    }
    for (std::size_t i = 1; i < model.quality_ceiling.size(); ++i) {
        if (model.quality_ceiling[i] < model.quality_ceiling[i - 1])
            throw Error("quality_ceiling must be non-decreasing in bitrate");
    }
    if (model.framerate_penalty < 0.0) throw Error("framerate_penalty must be >= 0");
    if (model.penalty_bitrate_decay < 0.0) throw Error("penalty_bitrate_decay must be >= 0");
    if (!(model.energy_per_fps > 0.0)) throw Error("energy_per_fps must be > 0");
    if (model.energy_resolution_exponent < 0.0)
        throw Error("energy_resolution_exponent must be >= 0");
    if (model.noise_amplitude < 0.0) throw Error("noise_amplitude must be >= 0");
}

MeasurementTable generate(const SyntheticModel& model, const Ladder& ladder,
                          int n_sequences) {
    validate_model(model, ladder);
    if (n_sequences < 1) throw Error("n_sequences must be >= 1");

    const double f_max = static_cast<double>(ladder.framerates.max_fps());
    const double b_min = static_cast<double>(ladder.rungs.front().bitrate_kbps);

    MeasurementTable table(ladder);
    std::uint64_t rng_state = model.seed;
    for (int s = 0; s < n_sequences; ++s) {
        char seq_id[16];
        std::snprintf(seq_id, sizeof(seq_id), "seq%04d", s);
        for (std::size_t i = 0; i < ladder.rungs.size(); ++i) {
            const Representation& rung = ladder.rungs[i];
            const double decay =
                std::pow(b_min / rung.bitrate_kbps, model.penalty_bitrate_decay);
            for (int fps : ladder.framerates.values) {
                const double gap =
                    model.framerate_penalty * std::log2(f_max / fps) * decay;
                const double noise = model.noise_amplitude * uniform_pm1(rng_state);
                const double vmaf =
                    std::clamp(model.quality_ceiling[i] - gap + noise, 0.0, 100.0);
                const double decode_energy =
                    model.energy_per_fps * fps *
                    std::pow(rung.height_px / kReferenceHeightPx,
                             model.energy_resolution_exponent);

                MeasurementRecord rec;
                rec.sequence_id = seq_id;
                rec.bitrate_kbps = rung.bitrate_kbps;
                rec.height_px = rung.height_px;
                rec.framerate_fps = fps;
                rec.vmaf = vmaf;
                rec.psnr_db = kPsnrBaseDb + kPsnrPerVmafPoint * vmaf;
                rec.ssim = kSsimBase + kSsimPerVmafPoint * vmaf;
                rec.decode_energy_j = decode_energy;
                rec.encode_energy_j = kEncodeEnergyFactor * decode_energy;
                table.insert(std::move(rec));
            }
        }
    }
    return table;
}

SyntheticModel load_model_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid model JSON: ") + e.what(), 0);
    }
    SyntheticModel model;
    try {
        model.seed = doc.at("seed").get<std::uint64_t>();
        model.quality_ceiling = doc.at("quality_ceiling").get<std::vector<double>>();
        model.framerate_penalty = doc.at("framerate_penalty").get<double>();
        model.penalty_bitrate_decay = doc.at("penalty_bitrate_decay").get<double>();
        model.energy_per_fps = doc.at("energy_per_fps").get<double>();
        model.energy_resolution_exponent =
            doc.at("energy_resolution_exponent").get<double>();
        model.noise_amplitude = doc.at("noise_amplitude").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid model JSON: ") + e.what(), 0);
    }
    return model;
}

void save_model_json(const SyntheticModel& model, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["seed"] = model.seed;
    doc["quality_ceiling"] = model.quality_ceiling;
    doc["framerate_penalty"] = model.framerate_penalty;
    doc["penalty_bitrate_decay"] = model.penalty_bitrate_decay;
    doc["energy_per_fps"] = model.energy_per_fps;
    doc["energy_resolution_exponent"] = model.energy_resolution_exponent;
    doc["noise_amplitude"] = model.noise_amplitude;
    out << doc.dump(2) << '\n';
}

}  // namespace vfropt
