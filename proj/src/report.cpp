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

#include "kscan/report.hpp"

#include <fstream>

#include "kscan/error.hpp"

namespace kscan {

nlohmann::json to_json(const KSearchReport& report) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : report.curve) {
    curve.push_back({{"k", p.k}, {"mean_accuracy", p.mean_accuracy}, {"std_accuracy", p.std_accuracy}});
  }
  return {
      {"best_k_per_fold", report.best_k_per_fold},
      {"k_star", report.k_star},
      {"k_max", report.k_max},
      {"curve", std::move(curve)},
      {"evaluated_k", report.evaluated_k},
      {"timing",
       {{"distance_seconds", report.timing.distance_seconds},
        {"sort_seconds", report.timing.sort_seconds},
        {"sweep_seconds", report.timing.sweep_seconds},
        {"total_seconds", report.timing.total_seconds}}},
  };
}

KSearchReport report_from_json(const nlohmann::json& j) {
  try {
    KSearchReport r;
    r.best_k_per_fold = j.at("best_k_per_fold").get<std::vector<std::size_t>>();
    r.k_star = j.at("k_star").get<std::size_t>();
    r.k_max = j.at("k_max").get<std::size_t>();
    r.evaluated_k = j.at("evaluated_k").get<std::vector<std::size_t>>();
    for (const auto& p : j.at("curve")) {
      r.curve.push_back({p.at("k").get<std::size_t>(), p.at("mean_accuracy").get<double>(),
                         p.at("std_accuracy").get<double>()});
    }
    const auto& t = j.at("timing");
    r.timing = {t.at("distance_seconds").get<double>(), t.at("sort_seconds").get<double>(),
                t.at("sweep_seconds").get<double>(), t.at("total_seconds").get<double>()};
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed report: ") + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace kscan
