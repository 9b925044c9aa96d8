#include "sparsehfs/reports.hpp"

#include <fstream>

#include "sparsehfs/error.hpp"
#include "sparsehfs/io.hpp"

namespace shfs {

nlohmann::json to_json(const BoundReport& rep) {
  return {{"pi", rep.pi},
          {"beta", rep.beta},
          {"empirical_inflation", rep.empirical_inflation},
          {"slack", rep.slack},
          {"total_rhs", rep.total_rhs}};
}

nlohmann::json to_json(const BoundInputs& in) {
  return {{"l", in.l},
          {"u", in.u},
          {"gamma", in.gamma},
          {"epsilon", in.epsilon},
          {"k", in.k},
          {"c", in.c},
          {"delta", in.delta},
          {"lambda_1", in.spectra.lambda_1},
          {"lambda_n", in.spectra.lambda_n},
          {"empirical_Rhat", in.empirical_rhat}};
}

nlohmann::json to_json(const SparsifierReport& rep) {
  return {{"min_eig", rep.min_eig},
          {"max_eig", rep.max_eig},
          {"epsilon", rep.epsilon},
          {"pass", rep.pass},
          {"edge_ratio", rep.edge_ratio},
          {"check", rep.sampled ? "sampled (necessary, not sufficient)"
                                : "exact"}};
}

nlohmann::json to_json(const RoundStats& r) {
  return {{"round", r.round},
          {"batch_edges", r.batch_edges},
          {"h_entries_before", r.h_entries_before},
          {"h_entries_after", r.h_entries_after},
          {"h_edges", r.h_edges},
          {"peak_retained", r.peak_retained}};
}

nlohmann::json to_json(const ProbeResult& r) {
  return {{"beta_hat", r.beta_hat},
          {"max_loss", r.max_loss},
          {"max_gap", r.max_gap},
          {"pairs", r.pairs}};
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_solution(const HfsSolution& sol, const SolutionMeta& meta,
                    const std::filesystem::path& csv_path,
                    const std::filesystem::path& json_path) {
  std::ofstream out(csv_path);
  if (!out) throw ValidationError("cannot write " + csv_path.string());
  out << "node,f,predicted_label\n";
  for (Eigen::Index i = 0; i < sol.f.size(); ++i) {
    const int label = sol.f[i] > 0.0 ? 1 : (sol.f[i] < 0.0 ? -1 : 0);
    out << i << ',' << format_real(sol.f[i]) << ',' << label << '\n';
  }
  write_json({{"mu", sol.mu},
              {"gamma", meta.gamma},
              {"epsilon", meta.epsilon},
              {"edge_ratio", meta.edge_ratio},
              {"residual", sol.residual}},
             json_path);
}

}  // namespace shfs
