// include/drivestate/experiment.h

// Copyright 2026 The drivestate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DRIVESTATE_EXPERIMENT_H_
#define DRIVESTATE_EXPERIMENT_H_

#include <vector>

#include "drivestate/config.h"
#include "drivestate/harness.h"
#include "json.hpp"

namespace drivestate {

// Feature matrices for every (set, windowed) the config needs. Sets with a
// cache file in features_dir are read from it; the rest are computed.
FeatureStore PrepareFeatures(const RunConfig &config, const Manifest &manifest);

struct ExperimentOutput {
  std::vector<CellResult> results;
  nlohmann::json meta;
};

// Validates the config, runs the selected grid and writes the report files
// into config.out_dir.
ExperimentOutput RunExperiment(const RunConfig &config);

}  // namespace drivestate

#endif  // DRIVESTATE_EXPERIMENT_H_
