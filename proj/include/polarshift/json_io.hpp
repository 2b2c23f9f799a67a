#pragma once

// nlohmann::json conversions for artifacts written to the output directory.

#include "json.hpp"

#include "polarshift/communities.hpp"
#include "polarshift/ingest.hpp"
#include "polarshift/shift.hpp"
#include "polarshift/stats.hpp"

namespace polarshift {

void to_json(nlohmann::json& j, const ParseReport& r);
void to_json(nlohmann::json& j, const BootstrapSummary& s);
void from_json(const nlohmann::json& j, BootstrapSummary& s);
void to_json(nlohmann::json& j, const TestResult& r);
void from_json(const nlohmann::json& j, TestResult& r);
void to_json(nlohmann::json& j, const GroupComparison& c);
void from_json(const nlohmann::json& j, GroupComparison& c);
void to_json(nlohmann::json& j, const OverlapReport& r);
void to_json(nlohmann::json& j, const Alignment& a);
void to_json(nlohmann::json& j, const DeltaMatrix& m);
void to_json(nlohmann::json& j, const AnchorEvidence& e);

nlohmann::json read_json_file(const std::string& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::string& path, const nlohmann::json& j);

} // namespace polarshift
