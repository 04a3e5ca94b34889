#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "ratekit/baselines.hpp"
#include "ratekit/crossval.hpp"
#include "ratekit/net.hpp"
#include "ratekit/preprocess.hpp"

namespace ratekit {

inline constexpr std::string_view kArtifactVersion = "1";

// FNV-1a over the canonical (sorted-key) JSON dump; hex string. Used to pair
// a model artifact with the pipeline artifact of the same run.
std::string fingerprint_of(const nlohmann::json& j);

// A fitted model of any kind, plus the fingerprint tying it to its pipeline.
struct ModelArtifact {
    ModelKind kind = ModelKind::linear;
    std::string fingerprint;
    std::optional<Network> net;
    std::optional<LinearModel> linear;
    std::optional<OvrLogisticModel> logistic;
};

void save_pipeline(const FittedPipeline& pipeline, const std::string& fingerprint,
                   const std::string& path);
// Validates the version; returns the stored fingerprint through the out-param.
FittedPipeline load_pipeline(const std::string& path, std::string* fingerprint = nullptr);

void save_model(const ModelArtifact& artifact, const std::string& path);
// Validates version and the shape manifest against the stored arrays.
ModelArtifact load_model(const std::string& path);

nlohmann::json read_json_file(const std::string& path);  // throws DataError
void write_json_file(const nlohmann::json& j, const std::string& path);

} // namespace ratekit
