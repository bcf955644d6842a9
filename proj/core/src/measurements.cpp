#include "vfropt/measurements.hpp"

#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "csv_util.hpp"
#include "vfropt/errors.hpp"

namespace vfropt {

namespace {

constexpr std::string_view kCsvHeader =
    "sequence,bitrate_kbps,height_px,framerate_fps,vmaf,psnr_db,ssim,"
    "decode_energy_j,encode_energy_j";

std::string key_to_string(const std::string& sequence_id, int bitrate_kbps, int height_px,
                          int framerate_fps) {
    return "(" + sequence_id + ", " + std::to_string(bitrate_kbps) + " kbps, " +
           std::to_string(height_px) + " px, " + std::to_string(framerate_fps) + " fps)";
}

}  // namespace

void validate_record(const MeasurementRecord& rec) {
    if (rec.sequence_id.empty()) throw Error("sequence id is empty");
    if (rec.bitrate_kbps <= 0) throw Error("bitrate_kbps must be positive");
    if (rec.height_px <= 0) throw Error("height_px must be positive");
    if (rec.framerate_fps <= 0) throw Error("framerate_fps must be positive");
    if (rec.vmaf < 0.0 || rec.vmaf > 100.0)
        throw Error("vmaf out of range [0,100]: " + detail::format_double(rec.vmaf));
    if (rec.psnr_db <= 0.0)
        throw Error("psnr_db must be positive: " + detail::format_double(rec.psnr_db));
    if (rec.ssim && (*rec.ssim < 0.0 || *rec.ssim > 1.0))
        throw Error("ssim out of range [0,1]: " + detail::format_double(*rec.ssim));
    if (rec.decode_energy_j < 0.0)
        throw Error("decode_energy_j must be non-negative: " +
                    detail::format_double(rec.decode_energy_j));
    if (rec.encode_energy_j && *rec.encode_energy_j < 0.0)
        throw Error("encode_energy_j must be non-negative: " +
                    detail::format_double(*rec.encode_energy_j));
}

MeasurementTable::MeasurementTable(Ladder ladder) : ladder_(std::move(ladder)) {
    validate_ladder(ladder_);
}

void MeasurementTable::insert(MeasurementRecord rec) {
    validate_record(rec);
    if (ladder_.find_rung(rec.bitrate_kbps, rec.height_px) == nullptr) {
        throw Error("unknown rung " + std::to_string(rec.bitrate_kbps) + " kbps @ " +
                    std::to_string(rec.height_px) + " px");
    }
    Key key{rec.sequence_id, rec.bitrate_kbps, rec.height_px, rec.framerate_fps};
    auto [it, inserted] = records_.emplace(std::move(key), std::move(rec));
    if (!inserted) {
        const auto& r = it->second;
        throw Error("duplicate record for " + key_to_string(r.sequence_id, r.bitrate_kbps,
                                                            r.height_px, r.framerate_fps));
    }
}

const MeasurementRecord* MeasurementTable::find(const std::string& sequence_id,
                                                int bitrate_kbps, int height_px,
                                                int framerate_fps) const {
    auto it = records_.find(Key{sequence_id, bitrate_kbps, height_px, framerate_fps});
    return it == records_.end() ? nullptr : &it->second;
}

std::vector<std::string> MeasurementTable::sequences() const {
    std::vector<std::string> out;
    for (const auto& [key, rec] : records_) {
        if (out.empty() || out.back() != rec.sequence_id) out.push_back(rec.sequence_id);
    }
    return out;  // map keys are sorted by sequence first
}

namespace {

MeasurementTable parse_csv(std::istream& in, const Ladder& ladder) {
    MeasurementTable table(ladder);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError("missing header row", 1);
    ++line_no;
    if (detail::strip_cr(line) != kCsvHeader) {
        throw ParseError("unexpected header, want '" + std::string(kCsvHeader) + "'", line_no);
    }

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view row = detail::strip_cr(line);
        if (row.empty()) continue;
        auto fields = detail::split_csv_line(row);
        if (fields.size() != 9) {
            throw ParseError("expected 9 fields, got " + std::to_string(fields.size()),
                             line_no);
        }
        MeasurementRecord rec;
        rec.sequence_id = std::string(fields[0]);
        rec.bitrate_kbps = detail::parse_int_field(fields[1], "bitrate_kbps", line_no);
        rec.height_px = detail::parse_int_field(fields[2], "height_px", line_no);
        rec.framerate_fps = detail::parse_int_field(fields[3], "framerate_fps", line_no);
        rec.vmaf = detail::parse_double_field(fields[4], "vmaf", line_no);
        rec.psnr_db = detail::parse_double_field(fields[5], "psnr_db", line_no);
        rec.ssim = detail::parse_optional_double_field(fields[6], "ssim", line_no);
        rec.decode_energy_j =
            detail::parse_double_field(fields[7], "decode_energy_j", line_no);
        rec.encode_energy_j =
            detail::parse_optional_double_field(fields[8], "encode_energy_j", line_no);
        try {
            table.insert(std::move(rec));
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return table;
}

MeasurementTable parse_json(std::istream& in, const Ladder& ladder) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid measurements JSON: ") + e.what(), 0);
    }
    if (!doc.is_array()) throw ParseError("measurements JSON must be an array", 0);

    MeasurementTable table(ladder);
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& obj = doc[i];
        MeasurementRecord rec;
        try {
            rec.sequence_id = obj.at("sequence").get<std::string>();
            rec.bitrate_kbps = obj.at("bitrate_kbps").get<int>();
            rec.height_px = obj.at("height_px").get<int>();
            rec.framerate_fps = obj.at("framerate_fps").get<int>();
            rec.vmaf = obj.at("vmaf").get<double>();
            rec.psnr_db = obj.at("psnr_db").get<double>();
            if (obj.contains("ssim") && !obj["ssim"].is_null())
                rec.ssim = obj["ssim"].get<double>();
            rec.decode_energy_j = obj.at("decode_energy_j").get<double>();
            if (obj.contains("encode_energy_j") && !obj["encode_energy_j"].is_null())
                rec.encode_energy_j = obj["encode_energy_j"].get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("record " + std::to_string(i) + ": " + e.what(), 0);
        }
        try {
            table.insert(std::move(rec));
        } catch (const Error& e) {
            throw ParseError("record " + std::to_string(i) + ": " + e.what(), 0);
        }
    }
    return table;
}

}  // namespace

MeasurementTable parse_measurements(std::istream& in, MeasurementFormat format,
                                    const Ladder& ladder) {
    validate_ladder(ladder);
    switch (format) {
        case MeasurementFormat::kCsv: return parse_csv(in, ladder);
        case MeasurementFormat::kJson: return parse_json(in, ladder);
    }
    throw Error("unknown measurement format");
}

void serialize_measurements(const MeasurementTable& table, MeasurementFormat format,
                            std::ostream& out) {
    if (format == MeasurementFormat::kCsv) {
        out << kCsvHeader << '\n';
        for (const auto& [key, rec] : table.records()) {
            out << rec.sequence_id << ',' << rec.bitrate_kbps << ',' << rec.height_px << ','
                << rec.framerate_fps << ',' << detail::format_double(rec.vmaf) << ','
                << detail::format_double(rec.psnr_db) << ','
                << (rec.ssim ? detail::format_double(*rec.ssim) : std::string()) << ','
                << detail::format_double(rec.decode_energy_j) << ','
                << (rec.encode_energy_j ? detail::format_double(*rec.encode_energy_j)
                                        : std::string())
                << '\n';
        }
        return;
    }

    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& [key, rec] : table.records()) {
        nlohmann::ordered_json obj;
        obj["sequence"] = rec.sequence_id;
        obj["bitrate_kbps"] = rec.bitrate_kbps;
        obj["height_px"] = rec.height_px;
        obj["framerate_fps"] = rec.framerate_fps;
        obj["vmaf"] = rec.vmaf;
        obj["psnr_db"] = rec.psnr_db;
        if (rec.ssim) obj["ssim"] = *rec.ssim;
        obj["decode_energy_j"] = rec.decode_energy_j;
        if (rec.encode_energy_j) obj["encode_energy_j"] = *rec.encode_energy_j;
        doc.push_back(std::move(obj));
    }
    out << doc.dump(2) << '\n';
}

std::vector<MissingCell> validate_completeness(const MeasurementTable& table) {
    std::vector<MissingCell> missing;
    for (const std::string& seq : table.sequences()) {
        for (const Representation& rung : table.ladder().rungs) {
            for (int fps : table.ladder().framerates.values) {
                if (table.find(seq, rung.bitrate_kbps, rung.height_px, fps) == nullptr) {
                    missing.push_back({seq, rung.bitrate_kbps, rung.height_px, fps});
                }
            }
        }
    }
    return missing;  // sequence / bitrate / framerate order by construction
}

}  // namespace vfropt
