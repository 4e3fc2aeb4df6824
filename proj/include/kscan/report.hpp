// Copyright 2026 The kscan Authors.
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

#include <filesystem>

#include "json.hpp"
#include "kscan/ksweep.hpp"

namespace kscan {

/// Field names follow KSearchReport; curve points are objects with
/// k / mean_accuracy / std_accuracy, timing holds *_seconds per phase.
nlohmann::json to_json(const KSearchReport& report);
KSearchReport report_from_json(const nlohmann::json& j);

/// Pretty-printed (2-space indent) with a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace kscan
