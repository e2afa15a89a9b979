#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qta {

// Dimensionless readout sequence plus the parameters needed to interpret it.
// Timestamps are implied as k*dt.
struct MeasurementRecord {
    std::vector<double> values;
    double dt = 16e-9;
    double strength = 1.97e6;

    std::size_t size() const { return values.size(); }
    void validate() const;  // finite values, positive dt/strength
};

// CSV "step,r" with full-precision readouts; a JSON sidecar <basename>.meta.json
// carries dt, strength, seed and generator version so the file is
// self-describing and reconstruction round-trips exactly.
std::string record_csv(const MeasurementRecord& rec);
std::string record_meta_json(const MeasurementRecord& rec, std::uint64_t seed);
void write_record(const MeasurementRecord& rec, const std::string& csv_path,
                  std::uint64_t seed);
MeasurementRecord read_record(const std::string& csv_path);

// <basename>.meta.json for any artifact path ending in an extension
std::string sidecar_path(const std::string& path);

}  // namespace qta
