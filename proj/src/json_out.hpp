// Copyright 2026 The pertbound Authors
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

#pragma once

// JSON encoding of reports. ordered_json keeps key order stable so equal
// inputs give byte-identical files.

#include "pertbound/bounds.hpp"
#include "pertbound/completion.hpp"
#include "pertbound/experiments.hpp"

#include <json.hpp>

namespace pertbound::detail {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Finite numbers as numbers, infinities as "inf" / "-inf", NaN as null.
Json number(double x);

Json to_json(const BoundReport& b);
Json to_json(const TOptimum& t);
Json to_json(const ConcentrationParams& p);
Json to_json(const WeylSummary& w);
Json to_json(const ComparisonTable& table);
Json to_json(const TrialResult& t);
Json to_json(const ExperimentConfig& cfg);
Json to_json(const RecoveryResult& r);

}  // namespace pertbound::detail
