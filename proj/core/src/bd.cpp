#include "vfropt/bd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <utility>

#include "csv_util.hpp"
#include "vfropt/errors.hpp"

namespace vfropt {

namespace {

// Fritsch-Carlson slope limiting: harmonic-mean interior slopes, three-point
// endpoint slopes clamped so the interpolant cannot overshoot monotone data.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        d[i] = (y[i + 1] - y[i]) / h[i];
    }

    std::vector<double> m(n, 0.0);
    if (n == 2) {
        m[0] = m[1] = d[0];
        return m;
    }

    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0.0) != (d[i] > 0.0)) {
            m[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }

    auto edge_slope = [](double h0, double h1, double d0, double d1) {
        double m0 = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m0 * d0 <= 0.0) {
            m0 = 0.0;
        } else if (d0 * d1 <= 0.0 && std::abs(m0) > 3.0 * std::abs(d0)) {
            m0 = 3.0 * d0;
        }
        return m0;
    };
    m[0] = edge_slope(h[0], h[1], d[0], d[1]);
    m[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    return m;
}

// Antiderivatives of the cubic Hermite basis over [0, s].
inline double basis_int_00(double s) { return ((0.5 * s - 1.0) * s * s * s) + s; }
inline double basis_int_10(double s) { return (((0.25 * s - 2.0 / 3.0) * s) + 0.5) * s * s; }
inline double basis_int_01(double s) { return (1.0 - 0.5 * s) * s * s * s; }
inline double basis_int_11(double s) { return (0.25 * s - 1.0 / 3.0) * s * s * s; }

}  // namespace

PchipInterpolant::PchipInterpolant(std::vector<double> x, std::vector<double> y,
                                   std::vector<double> slope)
    : x_(std::move(x)), y_(std::move(y)), slope_(std::move(slope)) {}

PchipInterpolant PchipInterpolant::fit(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size()) throw Error("interpolant input sizes differ");
    if (x.size() < 2) throw Error("interpolant needs at least 2 points");
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) throw Error("interpolant abscissae must be strictly increasing");
    }
    std::vector<double> slope = pchip_slopes(x, y);
    return PchipInterpolant(std::move(x), std::move(y), std::move(slope));
}

std::size_t PchipInterpolant::segment_of(double u) const {
    // Largest i with x_[i] <= u, clamped to the last segment start.
    auto it = std::upper_bound(x_.begin(), x_.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - x_.begin());
    if (idx == 0) return 0;
    return std::min(idx - 1, x_.size() - 2);
}

double PchipInterpolant::evaluate(double u) const {
    if (u < x_.front() || u > x_.back())
        throw Error("interpolant evaluated outside its knot range");
    std::size_t i = segment_of(u);
    double h = x_[i + 1] - x_[i];
    double s = (u - x_[i]) / h;
    double h00 = (2.0 * s - 3.0) * s * s + 1.0;
    double h10 = ((s - 2.0) * s + 1.0) * s;
    double h01 = (3.0 - 2.0 * s) * s * s;
    double h11 = (s - 1.0) * s * s;
    return y_[i] * h00 + h * slope_[i] * h10 + y_[i + 1] * h01 + h * slope_[i + 1] * h11;
}

double PchipInterpolant::integrate(double lo, double hi) const {
    if (lo > hi) throw Error("integration bounds reversed");
    if (lo < x_.front() || hi > x_.back())
        throw Error("integration bounds outside the knot range");

    // Exact antiderivative accumulated per segment; [a, b] is the clamp of
    // [lo, hi] to segment i, mapped to normalized coordinates.
    double total = 0.0;
    std::size_t first = segment_of(lo);
    std::size_t last = segment_of(hi);
    for (std::size_t i = first; i <= last; ++i) {
        double h = x_[i + 1] - x_[i];
        double a = std::max(lo, x_[i]);
        double b = std::min(hi, x_[i + 1]);
        if (b <= a) continue;
        double sa = (a - x_[i]) / h;
        double sb = (b - x_[i]) / h;
        double part = y_[i] * (basis_int_00(sb) - basis_int_00(sa)) +
                      h * slope_[i] * (basis_int_10(sb) - basis_int_10(sa)) +
                      y_[i + 1] * (basis_int_01(sb) - basis_int_01(sa)) +
                      h * slope_[i + 1] * (basis_int_11(sb) - basis_int_11(sa));
        total += h * part;
    }
    return total;
}

void validate_rd_curve(const RdCurve& curve) {
    if (curve.points.size() < 4)
        throw Error("curve needs at least 4 points, got " +
                    std::to_string(curve.points.size()));
    for (const RdPoint& p : curve.points) {
        if (!(p.x > 0.0)) throw Error("curve x values must be positive");
    }
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        if (!(curve.points[i].x > curve.points[i - 1].x))
            throw Error("curve x values must be strictly increasing");
        if (!(curve.points[i].quality > curve.points[i - 1].quality))
            throw Error("curve quality must be strictly increasing with x");
    }
}

RdCurve pareto_filter(const RdCurve& curve) {
    std::vector<RdPoint> pts = curve.points;
    std::sort(pts.begin(), pts.end(), [](const RdPoint& a, const RdPoint& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.quality > b.quality;
    });
    RdCurve out;
    out.x_kind = curve.x_kind;
    for (const RdPoint& p : pts) {
        if (out.points.empty() || p.quality > out.points.back().quality)
            out.points.push_back(p);
    }
    return out;
}

namespace {

struct Overlap {
    double lo;
    double hi;
};

Overlap overlap_or_throw(double ref_lo, double ref_hi, double test_lo, double test_hi,
                         const char* axis) {
    double lo = std::max(ref_lo, test_lo);
    double hi = std::min(ref_hi, test_hi);
    if (!(hi > lo))
        throw Error(std::string("curves have no overlapping ") + axis + " range");
    return {lo, hi};
}

}  // namespace

BdResult bd_quality(const RdCurve& reference, const RdCurve& test) {
    if (reference.x_kind != XAxisKind::kBitrateKbps ||
        test.x_kind != XAxisKind::kBitrateKbps)
        throw Error("bd_quality requires bitrate curves");
    validate_rd_curve(reference);
    validate_rd_curve(test);

    auto fit_log_rate = [](const RdCurve& c) {
        std::vector<double> u, q;
        u.reserve(c.points.size());
        q.reserve(c.points.size());
        for (const RdPoint& p : c.points) {
            u.push_back(std::log10(p.x));
            q.push_back(p.quality);
        }
        return PchipInterpolant::fit(std::move(u), std::move(q));
    };
    PchipInterpolant ref = fit_log_rate(reference);
    PchipInterpolant tst = fit_log_rate(test);

    Overlap ov = overlap_or_throw(ref.min_x(), ref.max_x(), tst.min_x(), tst.max_x(),
                                  "log-bitrate");
    double width = ov.hi - ov.lo;
    double value = (tst.integrate(ov.lo, ov.hi) - ref.integrate(ov.lo, ov.hi)) / width;
    return BdResult{value, ov.lo, ov.hi};
}

BdResult bdde(const RdCurve& reference, const RdCurve& test) {
    if (reference.x_kind != XAxisKind::kDecodeEnergyJ ||
        test.x_kind != XAxisKind::kDecodeEnergyJ)
        throw Error("bdde requires decoding-energy curves");
    validate_rd_curve(reference);
    validate_rd_curve(test);

    // Strictly increasing quality makes the curve invertible: log-energy is
    // interpolated as a function of quality.
    auto fit_log_energy = [](const RdCurve& c) {
        std::vector<double> q, e;
        q.reserve(c.points.size());
        e.reserve(c.points.size());
        for (const RdPoint& p : c.points) {
            q.push_back(p.quality);
            e.push_back(std::log10(p.x));
        }
        return PchipInterpolant::fit(std::move(q), std::move(e));
    };
    PchipInterpolant ref = fit_log_energy(reference);
    PchipInterpolant tst = fit_log_energy(test);

    Overlap ov =
        overlap_or_throw(ref.min_x(), ref.max_x(), tst.min_x(), tst.max_x(), "quality");
    double width = ov.hi - ov.lo;
    double mean_log_ratio =
        (tst.integrate(ov.lo, ov.hi) - ref.integrate(ov.lo, ov.hi)) / width;
    return BdResult{100.0 * (std::pow(10.0, mean_log_ratio) - 1.0), ov.lo, ov.hi};
}

double delta_energy(std::span<const std::pair<std::string, double>> reference,
                    std::span<const std::pair<std::string, double>> test) {
    auto to_map = [](std::span<const std::pair<std::string, double>> side,
                     const char* name) {
        std::map<std::string, double> m;
        for (const auto& [key, energy] : side) {
            if (!m.emplace(key, energy).second)
                throw Error(std::string("duplicate ") + name + " energy key '" + key + "'");
        }
        return m;
    };
    std::map<std::string, double> ref = to_map(reference, "reference");
    std::map<std::string, double> tst = to_map(test, "test");

    if (ref.size() != tst.size())
        throw Error("energy key sets differ: " + std::to_string(ref.size()) +
                    " reference vs " + std::to_string(tst.size()) + " test keys");
    double ref_total = 0.0, test_total = 0.0;
    auto ti = tst.begin();
    for (auto ri = ref.begin(); ri != ref.end(); ++ri, ++ti) {
        if (ri->first != ti->first)
            throw Error("energy key sets differ at '" + ri->first + "' vs '" + ti->first +
                        "'");
        ref_total += ri->second;
        test_total += ti->second;
    }
    if (ref_total <= 0.0) throw Error("total reference energy is zero");
    return 100.0 * (test_total - ref_total) / ref_total;
}

RdCurve curve_from_selections(std::span<const SelectionResult> results, XAxisKind axis,
                              CurveAggregate aggregate) {
    if (results.empty()) throw Error("cannot build a curve from an empty selection set");

    const Selector selector = results.front().selector;
    const double threshold = results.front().threshold;
    for (const SelectionResult& r : results) {
        if (r.selector != selector || r.threshold != threshold)
            throw Error("curve input mixes selectors or thresholds");
    }

    std::set<std::string> sequences;
    std::map<Representation, std::map<std::string, const SelectionResult*>> by_rung;
    for (const SelectionResult& r : results) {
        sequences.insert(r.sequence_id);
        if (!by_rung[r.rung].emplace(r.sequence_id, &r).second)
            throw Error("duplicate selection for rung " +
                        std::to_string(r.rung.bitrate_kbps) + " kbps in sequence " +
                        r.sequence_id);
    }
    if (aggregate == CurveAggregate::kPerSequence && sequences.size() > 1)
        throw Error("per-sequence curve requested over " +
                    std::to_string(sequences.size()) + " sequences");

    RdCurve curve;
    curve.x_kind = axis;
    for (const auto& [rung, per_seq] : by_rung) {
        if (per_seq.size() != sequences.size())
            throw Error("rung " + std::to_string(rung.bitrate_kbps) +
                        " kbps is not covered by every sequence");
        double energy_sum = 0.0, quality_sum = 0.0;
        for (const auto& [seq, r] : per_seq) {
            energy_sum += r->decode_energy_j;
            quality_sum += r->achieved_quality;
        }
        double n = static_cast<double>(per_seq.size());
        double x = axis == XAxisKind::kBitrateKbps ? static_cast<double>(rung.bitrate_kbps)
                                                   : energy_sum / n;
        curve.points.push_back({x, quality_sum / n});
    }

    std::stable_sort(curve.points.begin(), curve.points.end(),
                     [](const RdPoint& a, const RdPoint& b) {
                         if (a.x != b.x) return a.x < b.x;
                         return a.quality < b.quality;
                     });
    return curve;
}

void write_curve_csv(const RdCurve& curve, std::ostream& out) {
    out << "# x_kind="
        << (curve.x_kind == XAxisKind::kBitrateKbps ? "bitrate_kbps" : "decode_energy_j")
        << "\nx,quality\n";
    for (const RdPoint& p : curve.points) {
        out << detail::format_double(p.x) << ',' << detail::format_double(p.quality) << '\n';
    }
}

}  // namespace vfropt
