#include "qtarrow/record.hpp"

#include "qtarrow/numeric.hpp"
#include "qtarrow/version.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace qta {

std::string sidecar_path(const std::string& path) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.rfind('.');
    const bool has_ext = dot != std::string::npos &&
                         (slash == std::string::npos || dot > slash);
    return (has_ext ? path.substr(0, dot) : path) + ".meta.json";
}

void MeasurementRecord::validate() const {
    if (!(dt > 0) || !(strength > 0))
        throw std::invalid_argument("record: dt and strength must be positive");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("record: non-finite readout");
}

std::string record_csv(const MeasurementRecord& rec) {
    std::string out = "step,r\n";
    for (std::size_t k = 0; k < rec.values.size(); ++k)
        out += std::to_string(k) + "," + format_double(rec.values[k]) + "\n";
    return out;
}

std::string record_meta_json(const MeasurementRecord& rec, std::uint64_t seed) {
    nlohmann::ordered_json meta;
    meta["dt_s"] = rec.dt;
    meta["strength_per_s"] = rec.strength;
    meta["n"] = rec.values.size();
    meta["seed"] = seed;
    meta["generator_version"] = version;
    return meta.dump(2) + "\n";
}

void write_record(const MeasurementRecord& rec, const std::string& csv_path,
                  std::uint64_t seed) {
    rec.validate();
    std::ofstream f(csv_path);
    if (!f) throw std::runtime_error("cannot write " + csv_path);
    f << record_csv(rec);
    if (!f) throw std::runtime_error("write failed: " + csv_path);
    const std::string meta_path = sidecar_path(csv_path);
    std::ofstream m(meta_path);
    if (!m) throw std::runtime_error("cannot write " + meta_path);
    m << record_meta_json(rec, seed);
    if (!m) throw std::runtime_error("write failed: " + meta_path);
}

MeasurementRecord read_record(const std::string& csv_path) {
    const std::string meta_path = sidecar_path(csv_path);
    std::ifstream m(meta_path);
    if (!m)
        throw std::invalid_argument("missing record sidecar: expected " + meta_path);
    nlohmann::json meta = nlohmann::json::parse(m);
    if (!meta.contains("dt_s") || !meta.contains("strength_per_s"))
        throw std::invalid_argument(meta_path + ": not a measurement record sidecar");

    MeasurementRecord rec;
    rec.dt = meta.at("dt_s").get<double>();
    rec.strength = meta.at("strength_per_s").get<double>();

    std::ifstream f(csv_path);
    if (!f) throw std::invalid_argument("cannot read " + csv_path);
    std::string line;
    if (!std::getline(f, line) || line.rfind("step,r", 0) != 0)
        throw std::invalid_argument(csv_path + ": expected header step,r");
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument(csv_path + ": malformed row: " + line);
        rec.values.push_back(std::stod(line.substr(comma + 1)));
    }
    if (meta.contains("n") && meta.at("n").get<std::size_t>() != rec.values.size())
        throw std::invalid_argument(csv_path + ": row count disagrees with sidecar");
    rec.validate();
    return rec;
}

}  // namespace qta
