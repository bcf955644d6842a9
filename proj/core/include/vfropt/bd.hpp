#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vfropt/selection.hpp"

namespace vfropt {

// Monotone piecewise-cubic Hermite interpolant with slope limiting, fit
// through strictly increasing knots. For monotone data the interpolant is
// monotone on every segment (no overshoot between samples); it reproduces
// the knot values exactly. Integration uses the exact antiderivative per
// segment rather than numeric quadrature.
class PchipInterpolant {
public:
    // x strictly increasing, sizes equal, at least 2 points. Throws Error.
    static PchipInterpolant fit(std::vector<double> x, std::vector<double> y);

    // u must lie within [min_x(), max_x()]; no extrapolation. Throws Error.
    double evaluate(double u) const;

    // Closed-form integral over [lo, hi], both within the knot range and
    // lo <= hi. Throws Error.
    double integrate(double lo, double hi) const;

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }
    std::size_t size() const { return x_.size(); }

private:
    PchipInterpolant(std::vector<double> x, std::vector<double> y,
                     std::vector<double> slope);

    std::size_t segment_of(double u) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> slope_;  // endpoint derivatives per knot
};

enum class XAxisKind { kBitrateKbps, kDecodeEnergyJ };

struct RdPoint {
    double x = 0.0;        // bitrate in kbps or decoding energy in joules
    double quality = 0.0;  // VMAF points or PSNR dB

    friend bool operator==(const RdPoint&, const RdPoint&) = default;
};

// A rate-quality (or energy-quality) curve. The Bjontegaard operations
// require >= 4 points, strictly increasing positive x and strictly
// increasing quality; build one from arbitrary selection output via
// pareto_filter() when the raw points violate that.
struct RdCurve {
    std::vector<RdPoint> points;
    XAxisKind x_kind = XAxisKind::kBitrateKbps;

    friend bool operator==(const RdCurve&, const RdCurve&) = default;
};

// Throws Error unless the curve has >= 4 points, strictly increasing
// positive x and strictly increasing quality.
void validate_rd_curve(const RdCurve& curve);

// Keeps only non-dominated points: a point is dropped when another point
// offers at least its quality at no more x. The result is strictly
// increasing in both coordinates. Input order does not matter.
RdCurve pareto_filter(const RdCurve& curve);

struct BdResult {
    double value = 0.0;       // quality points (bd_quality) or percent (bdde)
    double overlap_lo = 0.0;  // integration interval on the transformed axis
    double overlap_hi = 0.0;

    friend bool operator==(const BdResult&, const BdResult&) = default;
};

// Average quality difference (test - reference) over the shared log10-bitrate
// range: both curves are interpolated as quality over log10(bitrate) and the
// difference is integrated in closed form over the overlap. Positive means
// the test curve delivers higher quality at equal bitrate.
// Requires both curves to have x_kind == kBitrateKbps. Throws Error on
// invalid curves or an empty overlap.
BdResult bd_quality(const RdCurve& reference, const RdCurve& test);

// Average decoding-energy difference at equal quality, in percent:
// log10(energy) is interpolated over quality for both curves, the difference
// G is averaged over the shared quality range, and the result is
// 100 * (10^G - 1). Negative means the test curve reaches the same quality
// with less energy.
// Requires both curves to have x_kind == kDecodeEnergyJ. Throws Error on
// invalid curves or an empty overlap.
BdResult bdde(const RdCurve& reference, const RdCurve& test);

// Total-sum relative energy difference in percent over pairwise-matched keys:
// 100 * (sum(test) - sum(reference)) / sum(reference).
// Throws Error on mismatched key sets, duplicate keys, or zero total
// reference energy.
double delta_energy(std::span<const std::pair<std::string, double>> reference,
                    std::span<const std::pair<std::string, double>> test);

enum class CurveAggregate { kPerSequence, kMeanOverSequences };

// Builds one curve point per rung from sweep output restricted to a single
// selector and threshold. x is the rung bitrate (kBitrateKbps) or the mean
// decoding energy (kDecodeEnergyJ); quality is the mean achieved quality.
// kPerSequence requires all results to come from one sequence;
// kMeanOverSequences requires every sequence to cover every rung. The
// returned curve is not Pareto-filtered or otherwise validated.
// Throws Error on empty input, mixed selectors/thresholds, or uneven rung
// coverage.
RdCurve curve_from_selections(std::span<const SelectionResult> results,
                              XAxisKind axis, CurveAggregate aggregate);

// Curve CSV: a "# x_kind=<bitrate_kbps|decode_energy_j>" comment line
// followed by an "x,quality" header and one row per point.
void write_curve_csv(const RdCurve& curve, std::ostream& out);

}  // namespace vfropt
