#pragma once

#include <filesystem>

#include <json.hpp>

#include "sparsehfs/analysis.hpp"
#include "sparsehfs/bench.hpp"
#include "sparsehfs/hfs.hpp"
#include "sparsehfs/sparsify.hpp"

namespace shfs {

nlohmann::json to_json(const BoundReport& rep);
nlohmann::json to_json(const BoundInputs& in);
nlohmann::json to_json(const SparsifierReport& rep);
nlohmann::json to_json(const RoundStats& r);
nlohmann::json to_json(const ProbeResult& r);

struct SolutionMeta {
  double gamma = 0.0;
  double epsilon = 0.0;     // 0 for an exact run
  double edge_ratio = 1.0;  // 1 for an exact run
};

// CSV `node,f,predicted_label` (predicted label = sign of f, 0 when f = 0)
// and a JSON sidecar {mu, gamma, epsilon, edge_ratio, residual}.
void write_solution(const HfsSolution& sol, const SolutionMeta& meta,
                    const std::filesystem::path& csv_path,
                    const std::filesystem::path& json_path);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace shfs
