#pragma once

#include <json.hpp>
#include <string>

#include "smallnoise/cojump.hpp"
#include "smallnoise/types.hpp"

namespace smallnoise {

// Writes `t,x1[,x2],y1[,y2]` with one row per grid point, 17 significant
// digits. Throws std::runtime_error with the path on I/O failure.
void write_path_csv(const NoisySample& sample, const std::string& path);

nlohmann::json truth_to_json(const LatentPath& path);
void write_truth_json(const LatentPath& path, const std::string& file);

nlohmann::json report_to_json(const TestReport& rep);

// 17-significant-digit decimal rendering used in all CSV output.
std::string format_real(double x);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace smallnoise
