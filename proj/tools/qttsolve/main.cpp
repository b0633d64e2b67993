// qttsolve: batch front end for the quantics solvers.
//
//   qttsolve run spec.yaml [--jobs N] [-v]
//   qttsolve validate spec.yaml
//   qttsolve compare a/summary.json b/summary.json [-o table.csv]
//   qttsolve export-slice spec.yaml state_0.qtt --dim 0 [--at i,j,k] -o slice.csv
//   qttsolve tci-sweep --bits 8 --box 25 --bonds 25,50,100 [-o curve.csv]
//
// Exit codes: 0 success (run: converged), 2 run finished without convergence, 1 error.

#include <CLI11.hpp>
#include <omp.h>

#include <fstream>
#include <iostream>

#include "pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kNotConverged = 2;

std::ostream& table_stream(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale quantics tensor train solver"};
  app.require_subcommand(1);

  std::string spec_path, summary_a, summary_b, train_path, out_path, quantity = "psi", ordering = "sequential";
  int jobs = 1, verbosity = 0, dim = 0, bits = 8, sweeps = 6;
  double box = 25.0, R = 2.0;
  std::vector<std::uint64_t> at;
  std::vector<qtt::Index> bonds{25, 50, 100};

  auto* run = app.add_subcommand("run", "execute a problem spec");
  run->add_option("spec", spec_path, "problem spec (YAML)")->required();
  run->add_option("-j,--jobs", jobs, "independent sub-solves run concurrently")->check(CLI::PositiveNumber);
  run->add_flag("-v,--verbose", verbosity, "print one trace line per sweep");

  auto* validate = app.add_subcommand("validate", "check a spec against the schema");
  validate->add_option("spec", spec_path, "problem spec (YAML)")->required();

  auto* compare = app.add_subcommand("compare", "align the per-sweep traces of two runs");
  compare->add_option("a", summary_a, "summary.json of the first run")->required();
  compare->add_option("b", summary_b, "summary.json of the second run")->required();
  compare->add_option("-o,--output", out_path, "table file (default stdout)");

  auto* slice = app.add_subcommand("export-slice", "write a 1D slice of a saved train");
  slice->add_option("spec", spec_path, "spec the train was produced with")->required();
  slice->add_option("train", train_path, "QTT1 train file")->required();
  slice->add_option("--dim", dim, "dimension along the slice");
  slice->add_option("--at", at, "grid index per dimension (default: centre)")->delimiter(',');
  slice->add_option("--quantity", quantity, "label written into the header");
  slice->add_option("-o,--output", out_path, "slice file")->required();

  auto* tci = app.add_subcommand("tci-sweep", "pivot error of the Coulomb kernel against the bond cap");
  tci->add_option("--bits", bits, "bits per dimension")->check(CLI::Range(2, 20));
  tci->add_option("--box", box, "half width of the cubic box")->check(CLI::PositiveNumber);
  tci->add_option("--R", R, "internuclear distance")->check(CLI::PositiveNumber);
  tci->add_option("--bonds", bonds, "bond caps")->delimiter(',');
  tci->add_option("--sweeps", sweeps, "sweeps per run")->check(CLI::PositiveNumber);
  tci->add_option("--ordering", ordering, "sequential or interleaved");
  tci->add_option("-o,--output", out_path, "table file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto spec = qttsolve::load_spec(spec_path);
      if (jobs > 1) omp_set_max_active_levels(1);
      const auto outcome = qttsolve::run(spec, {jobs, verbosity});
      std::cout << spec.output << "/summary.json" << (outcome.converged ? "" : " (not converged)") << '\n';
      return outcome.converged ? kOk : kNotConverged;
    }
    if (*validate) {
      const auto spec = qttsolve::load_spec(spec_path);
      std::cout << spec_path << ": ok (" << qttsolve::to_string(spec.kind) << ", " << spec.grid().total_bits() << " sites)\n";
      return kOk;
    }
    if (*compare) {
      const auto rows = qttsolve::compare(qttsolve::read_summary(summary_a), qttsolve::read_summary(summary_b));
      std::ofstream file;
      qttsolve::write_compare(table_stream(out_path, file), rows);
      return kOk;
    }
    if (*slice) {
      qttsolve::export_slice(qttsolve::load_spec(spec_path), train_path, dim, at, out_path, quantity);
      return kOk;
    }
    if (*tci) {
      const auto rows = qttsolve::tci_sweep(bits, box, R, qtt::ordering_from_string(ordering), bonds, sweeps);
      std::ofstream file;
      auto& os = table_stream(out_path, file);
      os << "bond,pivot_error,evaluations\n";
      for (const auto& r : rows) os << r.bond << ',' << r.error << ',' << r.evaluations << '\n';
      return kOk;
    }
  } catch (const qttsolve::SpecError& e) {
    std::cerr << "spec error: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
