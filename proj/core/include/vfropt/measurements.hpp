#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "vfropt/ladder.hpp"

namespace vfropt {

// One measured rendition: quality metrics and energy readings for a
// (sequence, bitrate, height, framerate) cell. ssim and encode_energy_j are
// optional columns; operations that need an absent column fail with a
// named-column error instead of guessing.
struct MeasurementRecord {
    std::string sequence_id;
    int bitrate_kbps = 0;
    int height_px = 0;
    int framerate_fps = 0;
    double vmaf = 0.0;     // [0, 100]
    double psnr_db = 0.0;  // > 0
    std::optional<double> ssim;  // [0, 1] when present
    double decode_energy_j = 0.0;  // >= 0
    std::optional<double> encode_energy_j;  // >= 0 when present

    friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

// Throws Error naming the offending field when a range invariant is violated.
void validate_record(const MeasurementRecord& rec);

// A grid cell that is required by the ladder but has no record.
struct MissingCell {
    std::string sequence_id;
    int bitrate_kbps = 0;
    int height_px = 0;
    int framerate_fps = 0;

    friend auto operator<=>(const MissingCell&, const MissingCell&) = default;
};

// Keyed collection of measurement records for one ladder. Records are keyed
// by (sequence, bitrate, height, framerate); iteration order is the sorted
// key order, which all sweep/report operations rely on for determinism.
// Immutable once built; safe to share across concurrent readers.
class MeasurementTable {
public:
    using Key = std::tuple<std::string, int, int, int>;

    MeasurementTable() = default;
    explicit MeasurementTable(Ladder ladder);

    const Ladder& ladder() const { return ladder_; }

    // Validates field ranges, rejects duplicate keys and (bitrate, height)
    // pairs that are not rungs of the ladder. Throws Error.
    void insert(MeasurementRecord rec);

    const MeasurementRecord* find(const std::string& sequence_id, int bitrate_kbps,
                                  int height_px, int framerate_fps) const;

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const std::map<Key, MeasurementRecord>& records() const { return records_; }

    // Distinct sequence ids in sorted order.
    std::vector<std::string> sequences() const;

    friend bool operator==(const MeasurementTable&, const MeasurementTable&) = default;

private:
    Ladder ladder_;
    std::map<Key, MeasurementRecord> records_;
};

enum class MeasurementFormat { kCsv, kJson };

// Measurements CSV header (fixed order, '.' decimal separator, empty cell =
// absent optional):
//   sequence,bitrate_kbps,height_px,framerate_fps,vmaf,psnr_db,ssim,decode_energy_j,encode_energy_j
// Measurements JSON: array of objects with the same field names.
//
// Throws ParseError (with line number for CSV) on malformed rows, duplicate
// keys, out-of-range metrics, and rows whose (bitrate, height) is not a rung
// of the ladder.
MeasurementTable parse_measurements(std::istream& in, MeasurementFormat format,
                                    const Ladder& ladder);

void serialize_measurements(const MeasurementTable& table, MeasurementFormat format,
                            std::ostream& out);

// Collect-all completeness check: for every sequence present in the table,
// every (rung x framerate) cell of the ladder must have a record. Returns
// every missing cell exactly once, ordered by (sequence, bitrate, framerate).
// Never throws.
std::vector<MissingCell> validate_completeness(const MeasurementTable& table);

}  // namespace vfropt
