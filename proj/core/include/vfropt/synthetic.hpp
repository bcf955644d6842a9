#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vfropt/ladder.hpp"
#include "vfropt/measurements.hpp"

namespace vfropt {

// Parametric measurement generator with known closed-form structure, used as
// test fixture and ground truth for property tests and trend reproduction.
//
// With noise_amplitude = 0 the generated values are
//   quality(b, r, f) = ceiling(b, r)
//                      - framerate_penalty * log2(f_max / f) * decay(b)
//   decay(b)         = (b_min / b) ^ penalty_bitrate_decay
//   decode_energy    = energy_per_fps * f * (r / 360) ^ energy_resolution_exponent
// where f_max is the ladder's highest framerate and b_min its lowest bitrate.
// Quality is clamped to [0, 100]; clamping is the only possible source of
// non-monotonicity when ceilings are near 100. Noise (uniform in
// [-noise_amplitude, +noise_amplitude]) is applied to quality only, so
// energy monotonicity stays exact.
//
// PSNR and SSIM are affine proxies of the (noisy) VMAF value, and encoding
// energy is a fixed multiple of decoding energy; they exist so that every
// record column is populated, not as perceptual claims.
struct SyntheticModel {
    std::uint64_t seed = 0;
    std::vector<double> quality_ceiling;  // per rung, aligned with ladder order
    double framerate_penalty = 0.0;       // VMAF points per halving of framerate
    double penalty_bitrate_decay = 0.0;   // decay exponent, >= 0
    double energy_per_fps = 1.0;          // joules per fps at 360 px, > 0
    double energy_resolution_exponent = 1.0;  // >= 0
    double noise_amplitude = 0.0;         // VMAF points, >= 0

    friend bool operator==(const SyntheticModel&, const SyntheticModel&) = default;
};

// Throws Error when the model violates its invariants against the ladder:
// ceiling list same length as rungs, non-decreasing, within [0, 100];
// penalty/decay/exponent/noise >= 0; energy_per_fps > 0.
void validate_model(const SyntheticModel& model, const Ladder& ladder);

// Generates a complete table (one record per sequence x rung x framerate,
// sequence ids "seq0000".."seqNNNN"). Deterministic: equal
// (model, ladder, n_sequences) produce identical tables, independent of
// platform. Throws Error on invalid model or n_sequences < 1.
MeasurementTable generate(const SyntheticModel& model, const Ladder& ladder,
                          int n_sequences);

// Model JSON mirrors the field list:
//   { "seed": 42, "quality_ceiling": [40, ...], "framerate_penalty": 4.0,
//     "penalty_bitrate_decay": 1.0, "energy_per_fps": 0.5,
//     "energy_resolution_exponent": 1.0, "noise_amplitude": 0.0 }
SyntheticModel load_model_json(std::istream& in);
void save_model_json(const SyntheticModel& model, std::ostream& out);

}  // namespace vfropt
