#pragma once
// JSON forms of the persisted types.

#include <filesystem>

#include <nlohmann/json.hpp>

#include "infohoc/core.hpp"
#include "infohoc/whitening.hpp"

namespace infohoc {

nlohmann::json to_json(const TransitionMatrix& t);
TransitionMatrix transition_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ConsensusStatistics& c);
ConsensusStatistics consensus_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EstimatorConfig& c);
EstimatorConfig config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const WhiteningTransform& w);
WhiteningTransform whitening_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

TransitionMatrix load_transition(const std::filesystem::path& path);
void save_transition(const std::filesystem::path& path, const TransitionMatrix& t);
Report load_report(const std::filesystem::path& path);
void save_report(const std::filesystem::path& path, const Report& r);

}  // namespace infohoc
