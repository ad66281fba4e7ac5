#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxstab/cones.hpp"
#include "maxstab/decompose.hpp"
#include "maxstab/diagnostics.hpp"
#include "maxstab/simulate.hpp"

namespace maxstab {

inline constexpr int kSchemaVersion = 1;

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);  // DataError on failure

// CSV, RFC-4180 style: header row, LF line ends, UTF-8, '.' decimal point.
std::string field_to_csv(const MaxStableField& field);
std::string curve_to_csv(const std::vector<LagEstimate>& curve);
std::string cesaro_to_csv(const CesaroCurve& curve);
std::string theta_to_csv(const std::vector<ThetaEstimate>& thetas);
std::string tail_to_csv(const std::vector<MixingCell>& cells);

nlohmann::json grid_to_json(const Grid& grid);
Grid grid_from_json(const nlohmann::json& j);

nlohmann::json field_to_json(const MaxStableField& field, bool include_atoms = true);
nlohmann::json verdict_to_json(const ConeVerdict& verdict, bool include_trace = true);
nlohmann::json classification_to_json(const PathClassification& cls,
                                      bool include_trace = true);
nlohmann::json m3_atoms_to_json(const M3Extraction& extraction);
nlohmann::json report_to_json(const DiagnosticReport& report);

} // namespace maxstab
