#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "abc/edge.hpp"
#include "abc/error.hpp"
#include "abc/hamiltform.hpp"
#include "abc/integrate.hpp"
#include "abc/perturb.hpp"
#include "abc/scan.hpp"
#include "svg.hpp"

namespace abc::cli {

namespace {

std::vector<OptionDef> withCommon(std::vector<OptionDef> opts) {
  opts.push_back({"output-dir", ".", "directory for output files"});
  return opts;
}

std::vector<OptionDef> flowParams(double A) {
  return {{"A", formatReal(A), "perturbation amplitude (epsilon)"},
          {"B", "1", "flow coefficient B"},
          {"C", "1", "flow coefficient C"}};
}

std::vector<OptionDef> concat(std::vector<OptionDef> a, const std::vector<OptionDef>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

AbcParams paramsOf(const RunConfig& c) { return {c.real("A"), c.real("B"), c.real("C")}; }

OrbitType orbitTypeOf(const RunConfig& c) {
  const std::string t = c.str("type");
  if (t == "A" || t == "a" || t == "TypeA") return OrbitType::TypeA;
  if (t == "B" || t == "b" || t == "TypeB") return OrbitType::TypeB;
  throw UsageError("type must be A or B, got '" + t + "'");
}

Json stateJson(const State& s) { return Json::array({s.x, s.y, s.z}); }

void addTrajectory(CsvTable& csv, const Trajectory& traj) {
  for (const TimePoint& p : traj.samples) csv.addRow({p.t, p.state.x, p.state.y, p.state.z});
}

Series seriesOf(const Trajectory& traj, std::string label) {
  Series s;
  s.label = std::move(label);
  for (const TimePoint& p : traj.samples) {
    s.x.push_back(p.state.x);
    s.y.push_back(p.state.y);
    s.z.push_back(p.state.z);
  }
  return s;
}

Json cmdIntegrate(const RunConfig& c, OutputSet& out, int) {
  const AbcParams params = paramsOf(c);
  IntegratorConfig cfg;
  const std::string method = c.str("method");
  if (method == "rk4") {
    cfg = IntegratorConfig::sweep();
    cfg.fixed_step = c.real("step");
  } else if (method == "dopri5") {
    cfg.abs_tol = cfg.rel_tol = c.real("tol");
    cfg.sample_spacing = c.real("spacing");
  } else {
    throw UsageError("method must be dopri5 or rk4");
  }
  const State s0{c.real("x0"), c.real("y0"), c.real("z0")};
  const Trajectory traj = integrate(params, s0, {0.0, c.real("t")}, cfg);
  CsvTable csv({"t", "x", "y", "z"});
  addTrajectory(csv, traj);
  out.write(".csv", csv.str());
  FigureData fig;
  fig.title = "xy projection";
  fig.series.push_back(seriesOf(traj, ""));
  out.write("-xy.svg", emitFigure(fig, FigureKind::XyProjection));
  const double h0 = hamiltonianH(params, s0.x, s0.y);
  const State end = traj.back().state;
  return {{"samples", traj.size()},
          {"final_state", stateJson(end)},
          {"H_initial", h0},
          {"H_final", hamiltonianH(params, end.x, end.y)}};
}

Json cmdSpiral(const RunConfig& c, OutputSet& out, int) {
  const AbcParams params = paramsOf(c);
  SpiralOptions opts;
  opts.modes = static_cast<int>(c.integer("modes"));
  opts.tol = c.real("tol");
  opts.max_iter = static_cast<int>(c.integer("max-iter"));
  const SpiralSolution sol = spiralFixedPoint(params, opts);
  const TimeRecovery tr = recoverTime(sol, 0.0, static_cast<int>(c.integer("periods")),
                                      static_cast<int>(c.integer("samples-per-period")));
  CsvTable csv({"t", "x", "y", "z"});
  Series s;
  for (const auto& [t, z] : tr.samples) {
    const State st = sol.stateAt(z);
    csv.addRow({t, st.x, st.y, st.z});
    s.x.push_back(st.x);
    s.y.push_back(st.y);
    s.z.push_back(st.z);
  }
  out.write(".csv", csv.str());
  FigureData fig;
  fig.title = "spiral orbit";
  fig.series.push_back(std::move(s));
  out.write("-path.svg", emitFigure(fig, FigureKind::Path3d));
  Json modes = Json::array();
  for (int j = 0; j <= sol.series.cutoff(); ++j) {
    modes.push_back({{"j", j},
                     {"x_re", sol.series.x[j].real()},
                     {"x_im", sol.series.x[j].imag()},
                     {"p_re", sol.series.p[j].real()},
                     {"p_im", sol.series.p[j].imag()}});
  }
  const Json result = {{"speed", sol.speed},
                       {"residual", sol.residual},
                       {"iterations", sol.iterations},
                       {"contraction_factor", sol.contractionFactor},
                       {"distances", sol.distances},
                       {"modes", modes}};
  out.writeJson("-result.json", result);
  return {{"speed", sol.speed}, {"residual", sol.residual}, {"iterations", sol.iterations}};
}

Json cmdEdge(const RunConfig& c, OutputSet& out, int threads) {
  ShootingProblem problem = ShootingProblem::standard(c.real("epsilon"), orbitTypeOf(c));
  if (!c.str("bracket").empty()) {
    const auto b = c.reals("bracket");
    if (b.size() != 2) throw UsageError("bracket expects two values lo,hi");
    problem.bracket = {b[0], b[1]};
  }
  problem.cfg.abs_tol = problem.cfg.rel_tol = c.real("tol");
  problem.threads = threads;
  const auto roots = findAllCritical(problem);
  Json list = Json::array();
  for (const ShootingResult& r : roots) {
    const PeriodicEdgeOrbit orbit = buildPeriodicOrbit(r, problem);
    list.push_back({{"a", r.a},
                    {"tA", r.tA},
                    {"period", orbit.period},
                    {"simultaneity_residual", r.simultaneityResidual},
                    {"bracket_width", r.bracketWidth},
                    {"translation", stateJson(orbit.translation)},
                    {"translation_residual", orbit.translationResidual()},
                    {"z_periodicity_residual", orbit.zPeriodicityResidual()}});
  }
  const PeriodicEdgeOrbit orbit = buildPeriodicOrbit(roots.front(), problem);
  CsvTable csv({"t", "x", "y", "z"});
  addTrajectory(csv, orbit.base);
  out.write(".csv", csv.str());
  FigureData fig;
  fig.title = std::string(to_string(problem.type)) + " edge orbit";
  const auto family = siblings(orbit);
  for (std::size_t k = 0; k < family.size(); ++k) {
    fig.series.push_back(seriesOf(family[k].base, "orbit " + std::to_string(k + 1)));
  }
  out.write("-xy.svg", emitFigure(fig, FigureKind::XyProjection));
  const Json result = {{"type", std::string(to_string(problem.type))},
                       {"epsilon", problem.epsilon},
                       {"a", roots.front().a},
                       {"tA", roots.front().tA},
                       {"roots", list}};
  out.writeJson("-result.json", result);
  return {{"a", roots.front().a}, {"tA", roots.front().tA}, {"roots", roots.size()}};
}

Json cmdPerturb(const RunConfig& c, OutputSet& out, int) {
  const double eps = c.real("epsilon");
  const double z0 = c.real("z0");
  const CriticalEstimate est = estimateCritical(eps);
  const QuarterTraverse q = quarterTraverse(eps, z0);
  const AbcParams params{eps, 1.0, 1.0};
  const Trajectory num = integrate(params, {-kHalfPi, 0.0, z0}, {0.0, q.time});
  CsvTable csv({"t", "x", "y", "z", "x_approx", "y_approx", "z_approx"});
  Series sn, sa;
  sn.label = "numerical";
  sa.label = "first order";
  double supErr = 0.0;
  const int n = 400;
  for (int k = 0; k <= n; ++k) {
    const double t = q.time * k / n;
    const State s = sampleAt(num, t);
    const State a = approximateState(eps, z0, t);
    supErr = std::max(supErr, (s - a).maxAbs());
    csv.addRow({t, s.x, s.y, s.z, a.x, a.y, a.z});
    sn.x.push_back(s.x);
    sn.y.push_back(s.y);
    sa.x.push_back(a.x);
    sa.y.push_back(a.y);
  }
  out.write(".csv", csv.str());
  FigureData fig;
  fig.title = "first-order approximation";
  fig.series = {sn, sa};
  out.write("-xy.svg", emitFigure(fig, FigureKind::XyProjection));
  Json quarter = {{"time", q.time}, {"state", stateJson(q.state)}, {"H", q.margin}};
  if (q.cell) quarter["cell"] = Json::array({q.cell->i, q.cell->j});
  try {
    const CellIndex p = predictedQuarterCell(z0);
    quarter["predicted_cell"] = Json::array({p.i, p.j});
  } catch (const Error&) {
    quarter["predicted_cell"] = nullptr;
  }
  const Json result = {{"epsilon", eps},
                       {"a_estimate", est.aEst},
                       {"tA_estimate", est.tAEst},
                       {"system_residual", est.systemResidual},
                       {"newton_iterations", est.iterations},
                       {"quarter_traverse", quarter},
                       {"sup_error", supErr}};
  out.writeJson("-result.json", result);
  return {{"a_estimate", est.aEst}, {"tA_estimate", est.tAEst}, {"sup_error", supErr}};
}

GridSpec gridOf(const RunConfig& c, Region region, std::size_t defaultPoints) {
  GridSpec g;
  g.region = std::move(region);
  const std::string sampling = c.str("sampling");
  if (sampling == "grid") {
    g.sampling = Sampling::UniformGrid;
  } else if (sampling == "random") {
    g.sampling = Sampling::UniformRandom;
  } else {
    throw UsageError("sampling must be grid or random");
  }
  const long pts = c.integer("points");
  g.nPoints = pts > 0 ? static_cast<std::size_t>(pts) : defaultPoints;
  g.seed = static_cast<std::uint64_t>(c.integer("seed"));
  return g;
}

Json cmdKam(const RunConfig& c, OutputSet& out, int threads) {
  const AbcParams params = paramsOf(c);
  const CellIndex cell{c.integer("cell-i"), c.integer("cell-j")};
  const long side = c.integer("grid");
  if (side < 1) throw UsageError("grid must be positive");
  const GridSpec grid = gridOf(c, CellRegion{cell}, static_cast<std::size_t>(side * side));
  const KamMask mask = kamScan(params, cell, c.real("z0"), grid, c.real("horizon"), threads);
  const auto [cols, rows] = gridDimensions(grid);
  CsvTable csv({"index", "col", "row", "x", "y", "trapped", "failed"});
  for (std::size_t i = 0; i < mask.initials.size(); ++i) {
    csv.addRow({static_cast<double>(i), static_cast<double>(i % cols),
                static_cast<double>(i / cols), mask.initials[i].x, mask.initials[i].y,
                static_cast<double>(mask.trapped[i]), static_cast<double>(mask.failed[i])});
  }
  out.write(".csv", csv.str());
  if (grid.sampling == Sampling::UniformGrid) {
    FigureData fig;
    fig.title = "trapped initial points";
    fig.xLabel = "u";
    fig.yLabel = "v";
    fig.mask = {cols, rows, mask.trapped};
    out.write("-mask.svg", emitFigure(fig, FigureKind::Mask));
  }
  const Json result = {{"trapped_fraction", mask.trappedFraction},
                       {"points", mask.initials.size()},
                       {"reverified", mask.reverified},
                       {"undetermined", mask.undetermined},
                       {"seed", grid.seed}};
  out.writeJson("-result.json", result);
  return result;
}

Json cmdFraction(const RunConfig& c, OutputSet& out, int threads) {
  const std::string rect = c.str("rect");
  const auto eps = c.reals("epsilon");
  const auto n = static_cast<std::size_t>(c.integer("n"));
  const double horizon = c.real("horizon");
  CsvTable csv({"epsilon", "r", "a_c", "fraction"});
  Series s;
  Json rows = Json::array();
  auto record = [&](double e, double r, double ac, double f) {
    csv.addRow({e, r, ac, f});
    rows.push_back({{"epsilon", e}, {"r", r}, {"a_c", ac}, {"fraction", f}});
  };
  if (rect == "R") {
    if (eps.size() != 1) throw UsageError("rect=R sweeps r at a single epsilon");
    double ac = 0.0;
    if (c.str("a-c") == "auto") {
      ShootingProblem p = ShootingProblem::standard(eps[0], OrbitType::TypeB);
      p.threads = threads;
      ac = findCritical(p).a;
    } else {
      ac = c.real("a-c");
    }
    for (double r : c.reals("r")) {
      const double f = linearFraction(eps[0], PlaneRect::shootingRect(r, ac), n, horizon, threads);
      record(eps[0], r, ac, f);
      s.x.push_back(r);
      s.y.push_back(f);
    }
    s.label = "R(r)";
  } else if (rect == "Rprime") {
    for (double e : eps) {
      const double f = linearFraction(e, PlaneRect::fullRect(), n, horizon, threads);
      record(e, 0.0, 0.0, f);
      s.x.push_back(e);
      s.y.push_back(f);
    }
    s.label = "R'";
  } else {
    throw UsageError("rect must be R or Rprime");
  }
  out.write(".csv", csv.str());
  FigureData fig;
  fig.title = "fraction with linear growth in x";
  fig.xLabel = rect == "R" ? "r" : "epsilon";
  fig.yLabel = "fraction";
  fig.series.push_back(std::move(s));
  out.write("-fraction.svg", emitFigure(fig, FigureKind::FractionCurve));
  return {{"rows", rows}};
}

Json cmdPoincare(const RunConfig& c, OutputSet& out, int threads) {
  const double eps = c.real("epsilon");
  ShootingProblem problem = ShootingProblem::standard(eps, orbitTypeOf(c));
  problem.threads = threads;
  const ShootingResult res = findCritical(problem);
  const PeriodicEdgeOrbit orbit = buildPeriodicOrbit(res, problem);
  const auto offsets = c.reals("offsets");
  const FixedPointCheck check = poincareFixedPointCheck(orbit, offsets, c.real("T"),
                                                        IntegratorConfig::tight(), threads);
  CsvTable csv({"offset", "t", "y", "z", "y_wrapped", "z_wrapped"});
  FigureData fig;
  fig.title = "section x = 0 mod 2pi";
  fig.xLabel = "y mod 2pi";
  fig.yLabel = "z mod 2pi";
  Json spreads = Json::array();
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    Series s;
    s.label = "a_c + " + formatReal(offsets[k]);
    for (const SectionPoint& p : check.sections[k].points) {
      csv.addRow({offsets[k], p.t, p.y, p.z, p.yWrapped, p.zWrapped});
      s.x.push_back(p.yWrapped);
      s.y.push_back(p.zWrapped);
    }
    fig.series.push_back(std::move(s));
    spreads.push_back({{"offset", offsets[k]},
                       {"points", check.sections[k].points.size()},
                       {"spread", sectionSpread(check.sections[k])},
                       {"extent", sectionExtent(check.sections[k])}});
  }
  out.write(".csv", csv.str());
  out.write("-section.svg", emitFigure(fig, FigureKind::Poincare));
  return {{"a_c", res.a}, {"sections", spreads}, {"fixed_point_spread", check.fixedPointSpread}};
}

Json cmdSpeed(const RunConfig& c, OutputSet& out, int threads) {
  const AbcParams params = paramsOf(c);
  const auto pv = c.reals("p");
  if (pv.size() != 3) throw UsageError("p expects three components");
  Vec3 p{pv[0], pv[1], pv[2]};
  const double norm = p.norm();
  if (!(norm > 0.0)) throw UsageError("p must be nonzero");
  p = (1.0 / norm) * p;
  const long side = c.integer("grid");
  if (side < 1) throw UsageError("grid must be positive");
  SpeedEnsemble ens;
  ens.grid = gridOf(c, CellRegion{{0, 0}}, static_cast<std::size_t>(side * side));
  ens.z0s = c.reals("z0s");
  ens.includeSolverOrbits = c.flag("include-solver-orbits");
  const SpeedEstimate est = speedFunctional(params, p, ens, c.real("T"), threads);
  const Json result = {{"direction", stateJson(est.direction)},
                       {"T", est.horizon},
                       {"best", est.best},
                       {"arg_best", stateJson(est.argBest)},
                       {"source", est.bestSource},
                       {"evaluated", est.evaluated}};
  out.writeJson("-result.json", result);
  return result;
}

Json cmdFigure(const RunConfig& c, OutputSet& out, int) {
  const CsvData data = readCsv(c.str("input"));
  const FigureKind kind = figureKindFromString(c.str("kind"));
  FigureData fig;
  fig.title = c.str("title");
  if (data.rows.empty()) throw Error(ErrorCode::EmptyData, "input CSV has no rows");
  if (kind == FigureKind::Mask) {
    const std::size_t ci = data.column("col"), ri = data.column("row");
    const std::size_t vi = data.column(c.str("value-column"));
    std::size_t cols = 0, rows = 0;
    for (const auto& r : data.rows) {
      cols = std::max(cols, static_cast<std::size_t>(r[ci]) + 1);
      rows = std::max(rows, static_cast<std::size_t>(r[ri]) + 1);
    }
    fig.mask = {cols, rows, std::vector<std::uint8_t>(cols * rows, 0)};
    for (const auto& r : data.rows) {
      fig.mask.cells[static_cast<std::size_t>(r[ri]) * cols + static_cast<std::size_t>(r[ci])] =
          r[vi] != 0.0 ? 1 : 0;
    }
  } else {
    const std::size_t xi = data.column(c.str("x-column"));
    const std::size_t yi = data.column(c.str("y-column"));
    const std::string zc = c.str("z-column");
    const std::optional<std::size_t> zi =
        zc.empty() ? std::nullopt : std::optional<std::size_t>(data.column(zc));
    const std::string gc = c.str("group-column");
    const std::optional<std::size_t> gi =
        gc.empty() ? std::nullopt : std::optional<std::size_t>(data.column(gc));
    std::map<double, Series> groups;
    for (const auto& r : data.rows) {
      Series& s = groups[gi ? r[*gi] : 0.0];
      s.x.push_back(r[xi]);
      s.y.push_back(r[yi]);
      if (zi) s.z.push_back(r[*zi]);
    }
    for (auto& [key, s] : groups) {
      if (gi) s.label = gc + " " + formatReal(key);
      fig.series.push_back(std::move(s));
    }
    fig.xLabel = c.str("x-column");
    fig.yLabel = c.str("y-column");
  }
  out.write(".svg", emitFigure(fig, kind));
  return {{"kind", to_string(kind)}, {"rows", data.rows.size()}};
}

using Handler = Json (*)(const RunConfig&, OutputSet&, int);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"integrate", cmdIntegrate},       {"spiral-solve", cmdSpiral},
      {"edge-shoot", cmdEdge},           {"perturb-estimate", cmdPerturb},
      {"kam-scan", cmdKam},              {"fraction-sweep", cmdFraction},
      {"poincare", cmdPoincare},         {"speed-estimate", cmdSpeed},
      {"figure", cmdFigure}};
  return h;
}

}  // namespace

const std::vector<CommandSpec>& commandSpecs() {
  static const std::vector<CommandSpec> specs{
      {"integrate", "integrate one trajectory and write t,x,y,z",
       withCommon(concat(flowParams(0.1),
                         {{"x0", "-1.5707963267948966", "initial x"},
                          {"y0", "0", "initial y"},
                          {"z0", "0.2254", "initial z"},
                          {"t", "100", "final time"},
                          {"method", "dopri5", "dopri5 or rk4"},
                          {"tol", "1e-10", "absolute and relative tolerance (dopri5)"},
                          {"step", "0.01", "step size (rk4)"},
                          {"spacing", "0", "output sample spacing (dopri5); 0 = automatic"}}))},
      {"spiral-solve", "spectral fixed point for the ballistic spiral orbit",
       withCommon(concat(flowParams(0.01),
                         {{"modes", "64", "Fourier cutoff N"},
                          {"tol", "1e-12", "fixed-point tolerance"},
                          {"max-iter", "200", "iteration limit"},
                          {"periods", "10", "z periods to write"},
                          {"samples-per-period", "256", "samples per z period"}}))},
      {"edge-shoot", "shooting for the critical height of a periodic edge orbit",
       withCommon({{"epsilon", "0.1", "perturbation amplitude"},
                   {"type", "A", "orbit type A (diagonal) or B (axis)"},
                   {"bracket", "", "lo,hi search interval; empty = default for the type"},
                   {"tol", "1e-10", "integration tolerance"}})},
      {"perturb-estimate", "first-order estimate of a and tA, and the quarter traverse",
       withCommon({{"epsilon", "0.1", "perturbation amplitude"},
                   {"z0", "0", "initial height on orbit 4"}})},
      {"kam-scan", "mask of initial points that never leave a cell",
       withCommon(concat(flowParams(0.05),
                         {{"z0", "0", "initial height"},
                          {"grid", "200", "points per side (grid sampling)"},
                          {"points", "0", "number of points; 0 = grid^2"},
                          {"sampling", "grid", "grid or random"},
                          {"seed", "0", "seed for random sampling"},
                          {"horizon", "50", "integration horizon"},
                          {"cell-i", "0", "cell index i"},
                          {"cell-j", "0", "cell index j"}}))},
      {"fraction-sweep", "fraction of orbits with linear growth in x",
       withCommon({{"rect", "R", "R (sweep r) or Rprime (sweep epsilon)"},
                   {"epsilon", "0.1", "epsilon, or comma list for Rprime"},
                   {"r", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1", "rectangle scales for R"},
                   {"a-c", "auto", "rectangle center height; auto = TypeB critical a"},
                   {"n", "400", "initial points per rectangle"},
                   {"horizon", "50", "integration horizon"}})},
      {"poincare", "section x = 0 mod 2pi near a periodic edge orbit",
       withCommon({{"epsilon", "0.1", "perturbation amplitude"},
                   {"type", "B", "orbit type A or B"},
                   {"offsets", "0,0.05,0.15,0.3", "offsets added to the critical height"},
                   {"T", "2000", "integration horizon"}})},
      {"speed-estimate", "max over an ensemble of p . (X(T) - X(0)) / T",
       withCommon(concat(flowParams(0.1),
                         {{"p", "1,1,0", "direction (normalized)"},
                          {"T", "200", "horizon"},
                          {"grid", "20", "points per side in cell (0,0)"},
                          {"points", "0", "number of points; 0 = grid^2"},
                          {"sampling", "grid", "grid or random"},
                          {"seed", "0", "seed for random sampling"},
                          {"z0s", "0", "comma list of initial heights"},
                          {"include-solver-orbits", "true", "add spiral and edge orbits"}}))},
      {"figure", "render an SVG from a CSV written by another command",
       withCommon({{"input", "", "input CSV"},
                   {"kind", "xy-projection",
                    "xy-projection, 3d-path, mask, poincare or fraction-curve"},
                   {"x-column", "x", "abscissa column"},
                   {"y-column", "y", "ordinate column"},
                   {"z-column", "", "height column (3d-path)"},
                   {"group-column", "", "column splitting rows into series"},
                   {"value-column", "trapped", "cell value column (mask)"},
                   {"title", "", "figure title"}})},
  };
  return specs;
}

const CommandSpec& commandSpec(const std::string& name) {
  for (const CommandSpec& s : commandSpecs()) {
    if (s.name == name) return s;
  }
  throw UsageError("unknown command '" + name + "'");
}

CommandResult runCommand(const RunConfig& config, int threads) {
  const auto start = std::chrono::steady_clock::now();
  const auto it = handlers().find(config.command());
  if (it == handlers().end()) throw UsageError("unknown command '" + config.command() + "'");
  OutputSet out(config.str("output-dir"), config);
  CommandResult r;
  r.summary = it->second(config, out, threads);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.files = out.files();
  r.manifest = out.writeManifest(r.summary, wall, resolveThreads(threads));
  return r;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Orbits of the near-integrable ABC flow"};
  app.require_subcommand(1);
  std::string configPath;
  std::string threadsFlag;
  app.add_option("--config", configPath, "key=value configuration file");
  app.add_option("--threads", threadsFlag, "worker threads (0 = all cores)");

  std::map<std::string, std::map<std::string, std::string>> storage;
  std::map<std::string, std::map<std::string, CLI::Option*>> given;
  for (const CommandSpec& spec : commandSpecs()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->fallthrough();
    for (const OptionDef& o : spec.options) {
      std::string help = o.help;
      if (!o.defaultValue.empty()) help += " [" + o.defaultValue + "]";
      given[spec.name][o.key] = sub->add_option("--" + o.key, storage[spec.name][o.key], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const KeyValues fileValues = configPath.empty() ? KeyValues{} : loadConfigFile(configPath);
    const CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    KeyValues flags;
    for (const auto& [key, opt] : given[name]) {
      if (opt->count() > 0) flags[key] = storage[name][key];
    }
    const RunConfig config = resolveConfig(name, commandSpec(name).options, fileValues, flags);
    const int threads = resolveThreadCount(
        threadsFlag.empty() ? std::nullopt : std::optional<std::string>(threadsFlag), fileValues);
    const CommandResult r = runCommand(config, threads);
    for (const auto& f : r.files) std::cout << f.string() << "\n";
    std::cout << r.manifest.string() << "\n";
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "UsageError: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) {
      std::cerr << "UsageError: " << e.what() << "\n";
      return 2;
    }
    std::cerr << "ComputationError: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ComputationError: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace abc::cli
