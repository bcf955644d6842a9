#pragma once

// Shared synthetic fixtures for the unit and acceptance suites.

#include <cstdio>

#include "vfropt/ladder.hpp"
#include "vfropt/measurements.hpp"
#include "vfropt/synthetic.hpp"

namespace fixtures {

// Strictly increasing ceilings below 100 so no value is clamped and every
// derived curve stays strictly increasing in bitrate.
inline std::vector<double> standard_ceilings() {
    return {40, 48, 55, 60, 66, 72, 77, 82, 86, 90, 94, 97};
}

// Quality penalized at low framerates, penalty decaying with bitrate,
// decoding energy proportional to framerate and resolution. Zero noise.
inline vfropt::SyntheticModel standard_model() {
    vfropt::SyntheticModel model;
    model.seed = 42;
    model.quality_ceiling = standard_ceilings();
    model.framerate_penalty = 4.0;
    model.penalty_bitrate_decay = 1.0;
    model.energy_per_fps = 0.5;
    model.energy_resolution_exponent = 1.0;
    model.noise_amplitude = 0.0;
    return model;
}

// Quality identical across framerates; energy still linear in framerate.
inline vfropt::SyntheticModel flat_quality_model() {
    vfropt::SyntheticModel model = standard_model();
    model.framerate_penalty = 0.0;
    return model;
}

// n sequences with per-sequence framerate penalties, merged into one table.
// Sequences genuinely differ (different selections and BD values) while every
// curve stays monotone, which pure noise cannot guarantee.
inline vfropt::MeasurementTable varied_sequences_table(int n) {
    vfropt::Ladder ladder = vfropt::default_ladder();
    vfropt::MeasurementTable merged(ladder);
    for (int s = 0; s < n; ++s) {
        vfropt::SyntheticModel model = standard_model();
        model.framerate_penalty = 3.0 + 0.7 * s;
        vfropt::MeasurementTable one = vfropt::generate(model, ladder, 1);
        for (const auto& [key, rec] : one.records()) {
            vfropt::MeasurementRecord copy = rec;
            char id[16];
            std::snprintf(id, sizeof(id), "seq%04d", s);
            copy.sequence_id = id;
            merged.insert(copy);
        }
    }
    return merged;
}

}  // namespace fixtures
