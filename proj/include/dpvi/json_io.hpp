// Copyright 2026 The dpvi Authors
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

#include <string>

#include <json.hpp>

#include "dpvi/nispp.hpp"
#include "dpvi/nseg.hpp"
#include "dpvi/privacy.hpp"
#include "dpvi/problems.hpp"

namespace dpvi {

using Json = nlohmann::json;

// Problem-instance file: family, set, constants, population payload (or
// null) and the sampling distribution. Matrices are flat row-major arrays
// with explicit dimensions.
struct InstanceFile {
  ProblemInstance instance;
  DataDistribution distribution;
};

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json set_to_json(const FeasibleSet& set);
FeasibleSet set_from_json(const Json& j);

Json payload_to_json(const Datapoint& dp);
Datapoint payload_from_json(Family family, const Json& j);

Json distribution_to_json(const DataDistribution& dist);
DataDistribution distribution_from_json(Family family, const Json& j);

Json instance_to_json(const InstanceFile& file);
InstanceFile instance_from_json(const Json& j);

InstanceFile load_instance(const std::string& path);
void save_json(const std::string& path, const Json& j);
Json load_json(const std::string& path);

Json nseg_config_to_json(const NsegConfig& cfg);
Json nispp_config_to_json(const NisppConfig& cfg);

Json calibration_report_to_json(const CalibrationReport& rep);

}  // namespace dpvi
