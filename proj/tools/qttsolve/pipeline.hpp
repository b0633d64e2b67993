#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "problem_spec.hpp"

namespace qttsolve {

struct RunOptions {
  int jobs = 1;
  int verbosity = 0;
};

struct RunOutcome {
  bool converged = false;
  nlohmann::json summary;
};

/// Executes the pipeline of the spec and writes log.jsonl, summary.json, trace.csv, state_*.qtt
/// and slice files into spec.output.
RunOutcome run(const ProblemSpec& spec, const RunOptions& options);

nlohmann::json read_summary(const std::string& path);

struct CompareRow {
  std::size_t step = 0;
  long updates_a = 0, updates_b = 0;
  double value_a = 0.0, value_b = 0.0;
  double error_a = 0.0, error_b = 0.0;
  bool has_error = false;
};

/// Per-sweep alignment of two run summaries (step k of one against step k of the other; the
/// shorter trace is padded with its final value). Throws on incompatible problems.
std::vector<CompareRow> compare(const nlohmann::json& a, const nlohmann::json& b);
void write_compare(std::ostream& os, const std::vector<CompareRow>& rows);

/// Writes a slice of a saved state through grid point `at` along `dim`.
void export_slice(const ProblemSpec& spec, const std::string& train_path, int dim, const qtt::MultiIndex& at,
                  const std::string& out_path, const std::string& quantity);

struct TciSweepRow {
  qtt::Index bond = 0;
  double error = 0.0;
  long evaluations = 0;
};
/// Pivot error of the Coulomb kernel (nuclei at +-R/2 on x, cell-centred grid) against the bond cap.
std::vector<TciSweepRow> tci_sweep(int bits, double box, double R, qtt::BitOrdering ordering,
                                   const std::vector<qtt::Index>& bonds, int sweeps);

}  // namespace qttsolve
