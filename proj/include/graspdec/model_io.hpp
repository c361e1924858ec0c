#pragma once

#include "graspdec/classify.hpp"
#include "graspdec/csp.hpp"
#include "graspdec/eval.hpp"

#include <string>

namespace graspdec {

// Model files: a "key: value" text header (kind, pair, dims, hyperparameters)
// terminated by a "payload: <count>" line, followed by that many raw
// little-endian f64 values.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

void save_csp_model(const CspModel& model, const std::string& path);
CspModel load_csp_model(const std::string& path);

void save_feature_matrix(const FeatureMatrix& features, const std::string& path);
FeatureMatrix load_feature_matrix(const std::string& path);

}  // namespace graspdec
