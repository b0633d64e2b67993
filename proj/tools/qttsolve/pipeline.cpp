#include "pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace qttsolve {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Collects the per-sweep trace through the solver observer and aborts on non-finite values.
class Tracer {
 public:
  explicit Tracer(int verbosity) : verbosity_(verbosity) {}

  void attach(qtt::SweepConfig& cfg, bool eigen,
              std::function<double(const qtt::SweepRecord&, const qtt::TensorTrain&)> error = {}) {
    cfg.observer = [this, eigen, error](const qtt::SweepRecord& s, const qtt::TensorTrain& x) {
      const double value = eigen ? s.energy : s.residual;
      if (!std::isfinite(value) || !std::isfinite(s.objective))
        throw std::runtime_error("non-finite value at level " + std::to_string(s.level) + " sweep " + std::to_string(s.sweep) +
                                 " (" + std::to_string(s.sites) + " sites)");
      updates_ += s.updates;
      json row{{"step", trace_.size()}, {"updates", updates_}, {"level", s.level}, {"sweep", s.sweep},
               {"sites", s.sites}, {"value", value}, {"max_bond", s.max_bond}};
      if (error) row["error"] = error(s, x);
      if (verbosity_ > 0) std::cerr << row.dump() << '\n';
      trace_.push_back(std::move(row));
    };
  }

  const json& trace() const { return trace_; }

 private:
  int verbosity_;
  long updates_ = 0;
  json trace_ = json::array();
};

json report_summary(const qtt::SolveReport& r) {
  std::stringstream ss;
  r.write_summary(ss);
  return json::parse(ss.str());
}

// Local update records with timestamps made monotone across the concatenated solves.
void write_log(std::ostream& os, const std::vector<qtt::SolveReport>& reports) {
  double offset = 0.0, last = 0.0;
  for (const auto& r : reports)
    for (const auto& u : r.updates) {
      if (u.time < last) offset += last;
      last = u.time;
      json j{{"level", u.level}, {"sweep", u.sweep}, {"site", u.site}, {"dir", std::string(1, u.direction)},
             {"value", u.value}, {"bond", u.bond}, {"discarded", u.discarded}, {"iterations", u.iterations},
             {"time", offset + u.time}};
      os << j.dump() << '\n';
    }
}

json grid_json(const qtt::QuanticsGrid& g) {
  json d = json::array();
  for (const auto& iv : g.domain()) d.push_back({iv.lo, iv.hi});
  return {{"bits", g.bits()}, {"ordering", qtt::to_string(g.ordering())}, {"domain", d}};
}

qtt::MultiIndex centre(const qtt::QuanticsGrid& g) {
  qtt::MultiIndex at;
  for (int d = 0; d < g.dims(); ++d) at.push_back(g.points(d) / 2);
  return at;
}

struct Output {
  fs::path dir;
  json files = json::array();

  std::string path(const std::string& name) {
    files.push_back(name);
    return (dir / name).string();
  }
};

void save_states(Output& out, const std::vector<qtt::TensorTrain>& states) {
  for (std::size_t k = 0; k < states.size(); ++k) qtt::save(out.path("state_" + std::to_string(k) + ".qtt"), states[k]);
}

bool all_converged(const std::vector<qtt::SolveReport>& reports) {
  for (const auto& r : reports)
    if (!r.converged) return false;
  return true;
}

// Electron observables and slices shared by the 3D kinds.
json electron_states(Output& out, const qtt::QuanticsGrid& grid, const qtt::EigenProblem& prob,
                     const std::vector<qtt::EigenState>& states, bool parity) {
  const auto h = prob.build(grid, prob.potential ? &*prob.potential : nullptr);
  const auto t = qtt::kinetic_mpo(grid, qtt::BoundaryCondition::uniform(3, qtt::BoundaryKind::DirichletZero), {0.5, 0.5, 0.5});
  json list = json::array();
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& psi = states[k].state;
    const double n = qtt::inner(psi, psi);
    const double e = qtt::expectation(psi, h, psi) / n, kin = qtt::expectation(psi, t, psi) / n;
    json j{{"energy", e}, {"kinetic", kin}, {"potential", e - kin}, {"virial", (e - kin) / kin}};
    if (parity) j["parity"] = qtt::parity_overlap(psi, grid, {0, 1, 2});
    const auto tag = std::to_string(k);
    qtt::write_slice(out.path("psi_x_" + tag + ".csv"), grid, 0, qtt::slice(psi, grid, 0, centre(grid)), "psi(x) at y, z centre");
    qtt::write_slice(out.path("density_x_" + tag + ".csv"), grid, 0, qtt::marginal_density(psi, grid, 0), "n_e(x) integrated over y, z");
    list.push_back(j);
  }
  return list;
}

RunOutcome run_poisson(const ProblemSpec& spec, Output& out, Tracer& tracer, std::vector<qtt::SolveReport>& reports) {
  const auto grid = spec.grid();
  auto sched = spec.cycle();
  json summary;
  qtt::CycleResult res;
  if (spec.kind == ProblemKind::PoissonBenchmark) {
    const auto p = spec.poisson;
    std::map<std::size_t, qtt::TensorTrain> refs;
    auto reference = [&](std::size_t sites) -> const qtt::TensorTrain& {
      auto it = refs.find(sites);
      if (it == refs.end()) {
        const int b = static_cast<int>(sites / 2);
        it = refs.emplace(sites, qtt::benchmark_reference(p, qtt::strip_grid(p, b, b, spec.ordering))).first;
      }
      return it->second;
    };
    tracer.attach(sched.sweep, false, [&](const qtt::SweepRecord& s, const qtt::TensorTrain& x) {
      return qtt::relative_error(x, reference(s.sites));
    });
    res = qtt::vcycle_linear(qtt::benchmark_problem(p, grid), sched);
    const double err = qtt::relative_error(res.solution, reference(grid.total_bits()));
    summary["error"] = err;
    std::ofstream es(out.path("errors.csv"));
    es << "level,sites,error\n" << std::setprecision(10);
    json per_level = json::array();
    for (const auto& row : tracer.trace()) {
      // last sweep of each level
      if (per_level.empty() || per_level.back()["level"] != row["level"]) per_level.push_back(row);
      else per_level.back() = row;
    }
    for (const auto& row : per_level) es << row["level"].get<int>() << ',' << row["sites"].get<int>() << ',' << row["error"].get<double>() << '\n';
    summary["level_errors"] = per_level;
  } else {
    const auto rho = qtt::density_train(spec.density, grid);
    summary["density_tci_error"] = rho.state.pivot_error;
    summary["density_mean"] = qtt::grid_mean(rho.train);
    tracer.attach(sched.sweep, false);
    res = qtt::vcycle_linear(qtt::density_problem(spec.density, grid, rho.train), sched);
    qtt::save(out.path("density.qtt"), rho.train);
    json means = json::array();
    for (const auto& d : res.descended) means.push_back(qtt::grid_mean(d));
    summary["descended_means"] = means;
  }
  reports.push_back(res.report);
  save_states(out, {res.solution});
  auto at = centre(grid);
  at[1] = grid.points(1) / 2;
  qtt::write_slice(out.path("V_x.csv"), grid, 0, qtt::slice(res.solution, grid, 0, at), "V(x) at y = h/2");
  qtt::write_slice(out.path("V_y.csv"), grid, 1, qtt::slice(res.solution, grid, 1, at), "V(y) at x = 0");
  return {res.report.converged, summary};
}

RunOutcome run_schrodinger(const ProblemSpec& spec, Output& out, Tracer& tracer, std::vector<qtt::SolveReport>& reports) {
  const auto grid = spec.grid();
  auto sched = spec.cycle();
  tracer.attach(sched.sweep, true);
  json summary;
  qtt::TciResult pot;
  qtt::EigenProblem prob;
  if (spec.kind == ProblemKind::Schrodinger3d) {
    pot = qtt::h2_potential_3d(spec.h2, grid);
    prob = qtt::h2_problem_3d(spec.h2, grid, pot.train);
  } else if (spec.kind == ProblemKind::Ha3d) {
    pot = qtt::ha_potential_3d(spec.h2, grid, spec.ha_r0, spec.ha_sigma);
    prob = qtt::h2_problem_3d(spec.h2, grid, pot.train);
  } else {
    pot = qtt::h2_potential_4d(spec.h2, grid);
    prob = qtt::h2_problem_4d(spec.h2, grid, pot.train);
  }
  summary["potential"] = {{"pivot_error", pot.state.pivot_error}, {"max_bond", pot.train.max_bond()},
                          {"evaluations", pot.state.evaluations}};
  std::vector<double> weights;
  if (spec.penalty_weight > 0.0) weights.assign(static_cast<std::size_t>(spec.states), spec.penalty_weight);
  auto res = qtt::vcycle_eigen(prob, sched, spec.states, weights);
  reports = res.reports;
  std::vector<qtt::TensorTrain> states;
  json energies = json::array();
  for (const auto& st : res.states) {
    states.push_back(st.state);
    energies.push_back(st.energy);
  }
  summary["energies"] = energies;
  save_states(out, states);
  if (spec.kind == ProblemKind::Schrodinger4d) {
    json list = json::array();
    const auto h = prob.build(grid, &pot.train);
    const auto egrid = qtt::drop_dimension(grid, 0);
    for (std::size_t k = 0; k < states.size(); ++k) {
      const auto& psi = states[k];
      const auto nn = qtt::marginal_density(psi, grid, 0);
      double integral = 0.0;
      for (double v : nn) integral += v * grid.spacing(0);
      const auto tag = std::to_string(k);
      qtt::write_slice(out.path("nuclear_density_" + tag + ".csv"), grid, 0, nn, "n_n(R)");
      auto ne = qtt::partial_density(psi, grid, {0});
      ne = qtt::scale(ne, 1.0 / (qtt::inner(psi, psi) * egrid.cell_volume()));
      qtt::write_slice(out.path("electron_density_x_" + tag + ".csv"), egrid, 0, qtt::slice(ne, egrid, 0, centre(egrid)),
                       "n_e(x) at y, z centre");
      list.push_back({{"energy", qtt::expectation(psi, h, psi) / qtt::inner(psi, psi)}, {"nuclear_density_integral", integral}});
    }
    summary["states"] = list;
  } else {
    summary["states"] = electron_states(out, grid, prob, res.states, spec.kind == ProblemKind::Schrodinger3d && spec.h2.field == 0.0);
  }
  return {all_converged(reports), summary};
}

RunOutcome run_vibrational(const ProblemSpec& spec, const RunOptions& options, Output& out, Tracer& tracer,
                           std::vector<qtt::SolveReport>& reports) {
  json summary;
  std::vector<double> r = spec.curve_r, e = spec.curve_e;
  bool converged = true;
  if (spec.electron) {
    const auto& el = *spec.electron;
    qtt::H2PlusSpec base = spec.h2;
    base.box = el.box;
    base.bits = el.bits;
    base.ordering = qtt::BitOrdering::Sequential;
    qtt::CycleSchedule sc;
    sc.n_min = el.n_min;
    sc.seed = spec.seed;
    sc.sweep.max_sweeps = el.max_sweeps;
    sc.sweep.tol = 1e-8;
    sc.sweep.truncation.max_bond = el.max_bond;
    sc.sweep.truncation.rel_tol = 1e-14;
    sc.sweep.krylov_max_iter = 80;
    sc.sweep.krylov_tol = 1e-8;
    std::vector<qtt::SolveReport> curve_reports;
    r = el.r_values;
    e = qtt::electronic_curve(r, base, sc, options.jobs, &curve_reports);
    converged = all_converged(curve_reports);
    for (double v : e)
      if (!std::isfinite(v)) throw std::runtime_error("non-finite electronic energy in the E(R) curve");
    std::ofstream cs(out.path("curve.csv"));
    cs << "R,E\n" << std::setprecision(17);
    for (std::size_t k = 0; k < r.size(); ++k) cs << r[k] << ',' << e[k] << '\n';
  }
  const auto grid = spec.grid();
  auto sched = spec.cycle();
  tracer.attach(sched.sweep, true);
  const double weight = spec.penalty_weight > 0.0 ? spec.penalty_weight : 1.0;
  auto vib = qtt::vibrational_1d(r, e, spec.h2.reduced_mass(), grid, spec.states, 5, &sched, weight);
  reports.insert(reports.end(), vib.reports.begin(), vib.reports.end());
  save_states(out, vib.states);
  for (std::size_t k = 0; k < vib.states.size(); ++k)
    qtt::write_slice(out.path("nuclear_density_" + std::to_string(k) + ".csv"), grid, 0,
                     qtt::marginal_density(vib.states[k], grid, 0), "n_n(R)");
  summary["energies"] = vib.energies;
  summary["fit"] = {{"r_min", vib.fit.r_min}, {"e_min", vib.fit.e_min}, {"curvature", vib.fit.curvature},
                    {"omega", vib.fit.omega}, {"omega_cm", vib.fit.omega_cm()}, {"ha_energy", vib.fit.ha_energy()}};
  summary["zero_point"] = vib.energies.front() - vib.fit.e_min;
  summary["curve"] = {{"R", r}, {"E", e}};
  return {converged && all_converged(vib.reports), summary};
}

}  // namespace

RunOutcome run(const ProblemSpec& spec, const RunOptions& options) {
  Output out;
  out.dir = spec.output;
  fs::create_directories(out.dir);
  Tracer tracer(options.verbosity);
  std::vector<qtt::SolveReport> reports;
  RunOutcome outcome;
  switch (spec.kind) {
    case ProblemKind::PoissonBenchmark:
    case ProblemKind::PoissonDensity: outcome = run_poisson(spec, out, tracer, reports); break;
    case ProblemKind::Schrodinger3d:
    case ProblemKind::Schrodinger4d:
    case ProblemKind::Ha3d: outcome = run_schrodinger(spec, out, tracer, reports); break;
    case ProblemKind::Vibrational1d: outcome = run_vibrational(spec, options, out, tracer, reports); break;
  }
  {
    std::ofstream log(out.path("log.jsonl"));
    write_log(log, reports);
  }
  {
    std::ofstream tr(out.path("trace.csv"));
    tr << "step,updates,level,sweep,value,error\n" << std::setprecision(17);
    for (const auto& row : tracer.trace())
      tr << row["step"].get<long>() << ',' << row["updates"].get<long>() << ',' << row["level"].get<int>() << ','
         << row["sweep"].get<int>() << ',' << row["value"].get<double>() << ','
         << (row.contains("error") ? row["error"].get<double>() : std::nan("")) << '\n';
  }
  json& s = outcome.summary;
  s["problem"] = to_string(spec.kind);
  s["seed"] = spec.seed;
  s["grid"] = grid_json(spec.grid());
  s["converged"] = outcome.converged;
  s["trace"] = tracer.trace();
  json solver = json::array();
  for (const auto& r : reports) solver.push_back(report_summary(r));
  s["solver"] = solver;
  out.files.push_back("summary.json");
  s["files"] = out.files;
  std::ofstream(out.dir / "summary.json") << s.dump(2) << '\n';
  return outcome;
}

json read_summary(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::vector<CompareRow> compare(const json& a, const json& b) {
  for (const auto* j : {&a, &b})
    if (!j->contains("problem") || !j->contains("trace")) throw std::invalid_argument("compare: not a run summary");
  if (a["problem"] != b["problem"])
    throw std::invalid_argument("compare: incompatible problems " + a["problem"].get<std::string>() + " and " +
                                b["problem"].get<std::string>());
  if (a["grid"]["bits"] != b["grid"]["bits"]) throw std::invalid_argument("compare: runs end on different grids");
  const auto& ta = a["trace"];
  const auto& tb = b["trace"];
  if (ta.empty() || tb.empty()) throw std::invalid_argument("compare: empty trace");
  std::vector<CompareRow> rows;
  const std::size_t n = std::max(ta.size(), tb.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& ra = ta[std::min(k, ta.size() - 1)];
    const auto& rb = tb[std::min(k, tb.size() - 1)];
    CompareRow row;
    row.step = k;
    row.updates_a = ra["updates"];
    row.updates_b = rb["updates"];
    row.value_a = ra["value"];
    row.value_b = rb["value"];
    if (ra.contains("error") && rb.contains("error")) {
      row.has_error = true;
      row.error_a = ra["error"];
      row.error_b = rb["error"];
    }
    rows.push_back(row);
  }
  return rows;
}

void write_compare(std::ostream& os, const std::vector<CompareRow>& rows) {
  const bool err = !rows.empty() && rows.front().has_error;
  os << "step,updates_a,updates_b,value_a,value_b,value_diff";
  if (err) os << ",error_a,error_b,error_diff";
  os << '\n' << std::setprecision(12);
  for (const auto& r : rows) {
    os << r.step << ',' << r.updates_a << ',' << r.updates_b << ',' << r.value_a << ',' << r.value_b << ','
       << r.value_a - r.value_b;
    if (err) os << ',' << r.error_a << ',' << r.error_b << ',' << r.error_a - r.error_b;
    os << '\n';
  }
}

void export_slice(const ProblemSpec& spec, const std::string& train_path, int dim, const qtt::MultiIndex& at,
                  const std::string& out_path, const std::string& quantity) {
  const auto grid = spec.grid();
  const auto psi = qtt::load(train_path);
  if (psi.size() != grid.total_bits())
    throw std::invalid_argument("export-slice: train has " + std::to_string(psi.size()) + " sites, the spec grid " +
                                std::to_string(grid.total_bits()));
  if (dim < 0 || dim >= grid.dims()) throw std::invalid_argument("export-slice: dimension out of range");
  qtt::MultiIndex where = at.empty() ? centre(grid) : at;
  if (static_cast<int>(where.size()) != grid.dims())
    throw std::invalid_argument("export-slice: --at needs one index per dimension");
  qtt::write_slice(out_path, grid, dim, qtt::slice(psi, grid, dim, where), quantity);
}

std::vector<TciSweepRow> tci_sweep(int bits, double box, double R, qtt::BitOrdering ordering,
                                   const std::vector<qtt::Index>& bonds, int sweeps) {
  qtt::H2PlusSpec s;
  s.bits = bits;
  s.box = box;
  s.R = R;
  s.ordering = ordering;
  const auto grid = qtt::h2_grid_3d(s);
  const double hx = 0.5 * grid.spacing(0), hy = 0.5 * grid.spacing(1), hz = 0.5 * grid.spacing(2);
  std::vector<TciSweepRow> rows;
  for (auto b : bonds) {
    qtt::FunctionAdaptor f([=](std::span<const double> p) { return qtt::coulomb_kernel(R, p[0] + hx, p[1] + hy, p[2] + hz); });
    qtt::TciConfig cfg;
    cfg.max_bond = b;
    cfg.tol = 0.0;
    cfg.max_sweeps = sweeps;
    const auto res = qtt::cross_interpolate(f, grid, cfg);
    rows.push_back({b, res.state.pivot_error, f.evaluations()});
  }
  return rows;
}

}  // namespace qttsolve
