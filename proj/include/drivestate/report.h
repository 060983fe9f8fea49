// include/drivestate/report.h

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

#ifndef DRIVESTATE_REPORT_H_
#define DRIVESTATE_REPORT_H_

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "drivestate/harness.h"
#include "json.hpp"

namespace drivestate {

inline constexpr const char *kResultsHeader = "seed,Embedding,Classifier,Baseline,Window,Accuracy,AUC";

// Rows sorted by descending AUC (undefined AUC last, ties keep input order),
// numbers with 3 decimals, "null" for undefined values.
void WriteResultsCsv(std::ostream &out, const std::vector<CellResult> &results);

nlohmann::json PerSubjectJson(const std::vector<CellResult> &results);

// Lossless form of the results, read back by the report subcommand.
nlohmann::json CellsToJson(const std::vector<CellResult> &results);
std::vector<CellResult> CellsFromJson(const nlohmann::json &json);

// Notes attached to run metadata, e.g. the voice-quality subset marker.
nlohmann::json FeatureSetNotes();

// Writes results.csv, per_subject.json and cells.json into dir, plus
// transforms.json / models.json when any fold carries dumps, plus
// run_meta.json when 'meta' is not null.
void WriteReport(const std::filesystem::path &dir, const std::vector<CellResult> &results,
                 const nlohmann::json &meta);

}  // namespace drivestate

#endif  // DRIVESTATE_REPORT_H_
