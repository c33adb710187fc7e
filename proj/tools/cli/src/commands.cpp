#include "curvflow_cli/commands.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "curvflow/curvature.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/verify.hpp"
#include "curvflow_cli/io.hpp"

namespace curvflow::cli {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string sci(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::scientific, 3);
  return std::string(buf.data(), res.ptr);
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

ojson config_json(const RunConfig& c, std::optional<double> resolved_dt) {
  ojson j;
  j["scenario"]["name"] = c.scenario.name;
  j["scenario"]["params"] = ojson::object();
  for (const auto& [k, v] : c.scenario.params) j["scenario"]["params"][k] = v;
  j["grid"]["counts"] = c.scenario.counts;
  j["fd_order"] = static_cast<int>(c.fd_order);
  j["integrator"]["scheme"] = scheme_name(c.integrator.scheme);
  if (resolved_dt) {
    j["integrator"]["dt"] = *resolved_dt;
  } else if (c.integrator.dt) {
    j["integrator"]["dt"] = *c.integrator.dt;
  } else {
    j["integrator"]["dt"] = "auto";
  }
  j["integrator"]["dt_requested"] = c.integrator.dt ? ojson(*c.integrator.dt) : ojson("auto");
  j["integrator"]["t_end"] = c.integrator.t_end;
  j["integrator"]["cfl_safety"] = c.integrator.cfl_safety;
  j["integrator"]["snapshot_stride"] = c.integrator.snapshot_stride;
  j["checks"] = c.checks;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  if (c.flow) j["flow"] = flow_name(*c.flow);
  j["snapshot_index"] = c.snapshot_index ? ojson(*c.snapshot_index) : ojson("middle");
  if (c.levels) j["levels"] = *c.levels;
  j["write_snapshots"] = c.write_snapshots;
  if (c.sweep) {
    j["sweep"]["resolutions"] = c.sweep->resolutions;
    if (!c.sweep->dts.empty()) j["sweep"]["dts"] = c.sweep->dts;
  }
  return j;
}

ojson scenario_json(const Scenario& s) {
  ojson j;
  j["name"] = s.name;
  j["params"] = ojson::object();
  for (const auto& [k, v] : s.params) j["params"][k] = v;
  std::vector<int> counts;
  std::vector<int> halo;
  for (int a = 0; a < s.grid->dim(); ++a) {
    counts.push_back(s.grid->count(a));
    halo.push_back(s.grid->halo(a));
  }
  j["counts"] = counts;
  j["halo"] = halo;
  return j;
}

ojson norms_json(const Norms& n) {
  ojson j;
  j["linf"] = n.linf;
  j["l2"] = n.l2;
  j["nodes"] = n.nodes;
  return j;
}

ojson entry_json(const CheckEntry& e) {
  ojson j;
  j["name"] = e.name;
  j["tier"] = tier_name(e.tier);
  j["residual"] = norms_json(e.residual);
  if (e.lhs) j["lhs"] = norms_json(*e.lhs);
  if (e.rhs) j["rhs"] = norms_json(*e.rhs);
  if (e.relative) {
    j["relative"] = *e.relative;
    j["relative_tolerance"] = kAlgebraicTolerance;
  }
  if (e.lhs_oracle) j["lhs_oracle"] = *e.lhs_oracle;
  if (e.rhs_oracle) j["rhs_oracle"] = *e.rhs_oracle;
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

ojson study_json(const ConvergenceStudy& st, FdOrder p) {
  ojson levels = ojson::array();
  for (const auto& l : st.levels) {
    ojson lj;
    lj["counts"] = l.counts;
    lj["h"] = l.h;
    lj["dt"] = l.dt;
    lj["t"] = l.t;
    lj["snapshot"] = l.report.snapshot;
    lj["entries"] = ojson::array();
    for (const auto& e : l.report.entries) lj["entries"].push_back(entry_json(e));
    levels.push_back(std::move(lj));
  }
  ojson checks = ojson::array();
  for (const auto& c : st.checks) {
    ojson cj;
    cj["name"] = c.name;
    cj["tier"] = tier_name(c.tier);
    cj["classification"] = c.classification;
    cj["passed"] = c.passed;
    cj["affects_exit_code"] = c.tier != Tier::reported;
    if (c.tier != Tier::algebraic) {
      cj["identity_threshold"] = check_info(c.name).identity_threshold(p);
      cj["fitted_order"] = c.fitted_order;
      cj["pairwise_orders"] = c.pairwise_orders;
    }
    cj["residual_linf"] = c.residuals;
    cj["lhs_linf"] = c.lhs;
    cj["rhs_linf"] = c.rhs;
    if (const CheckEntry* e = st.levels.back().report.find(c.name)) cj["finest"] = entry_json(*e);
    checks.push_back(std::move(cj));
  }
  ojson j;
  j["levels"] = std::move(levels);
  j["checks"] = std::move(checks);
  return j;
}

void print_table(const ConvergenceStudy& st, std::ostream& log) {
  log << pad("check", 22) << pad("tier", 11) << pad("class", 16) << pad("order", 15)
      << pad("residual", 12) << pad("lhs_l2", 12) << "rhs_l2\n";
  for (const auto& c : st.checks) {
    const CheckEntry* e = st.levels.back().report.find(c.name);
    std::string order = c.tier == Tier::algebraic
                            ? (e && e->relative ? "rel " + sci(*e->relative) : "-")
                            : sci(c.fitted_order);
    log << pad(c.name, 22) << pad(tier_name(c.tier), 11) << pad(c.classification, 16)
        << pad(order, 15) << pad(sci(c.residuals.back()), 12)
        << pad(e && e->lhs ? sci(e->lhs->l2) : "-", 12) << (e && e->rhs ? sci(e->rhs->l2) : "-")
        << '\n';
  }
}

std::string json_text(const ojson& j) { return j.dump(2) + "\n"; }

int study_exit(const ConvergenceStudy& st) {
  return st.all_required_passed() ? kOk : kCheckFailed;
}

StudyConfig study_config(const RunConfig& c) {
  StudyConfig sc;
  sc.scenario = c.scenario;
  sc.which = c.checks;
  sc.integrator = c.integrator;
  sc.p = c.fd_order;
  sc.snapshot = c.snapshot_index;
  return sc;
}

}  // namespace

int cmd_run(const RunConfig& c, std::ostream& log) {
  const FdOrder p = c.fd_order;
  const Scenario s = make_scenario(c.scenario, p);
  const FlowKind flow = c.flow.value_or(s.embedding ? FlowKind::mcf : FlowKind::ricci);
  if (flow == FlowKind::mcf && !s.embedding) {
    throw ConfigError("scenario '" + s.name + "' is intrinsic; use \"flow\": \"ricci\"");
  }
  const FlowTrajectory traj =
      flow == FlowKind::mcf ? integrate_mcf(s, c.integrator, p) : integrate_ricci_flow(s, c.integrator, p);

  const fs::path out = c.output_dir;
  fs::create_directories(out);
  fs::remove(out / "DEGENERATED");

  std::vector<std::string> header{"t"};
  const bool embedded = flow == FlowKind::mcf;
  if (embedded) header.insert(header.end(), s.radius_names.begin(), s.radius_names.end());
  for (const char* h : {"R_min", "R_max", "R_mean", "min_eig_g"}) header.emplace_back(h);
  if (embedded) header.emplace_back("lapX_inf");
  header.emplace_back("riem_inf");
  CsvTable table(header);

  const auto nodes = residual_nodes(*s.grid, p);
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const FlowState& st = traj.snapshots[i];
    const MetricField m = embedded ? induced_metric(st.embedding(), p) : st.metric();
    const CurvaturePack cp = curvature_pack(m, p);
    double rmin = cp.scalar(nodes.front(), 0);
    double rmax = rmin;
    double rsum = 0.0;
    for (std::size_t k : nodes) {
      const double r = cp.scalar(k, 0);
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      rsum += r;
    }
    std::vector<std::string> row{format_number(st.t)};
    if (embedded && s.radii) {
      for (double r : s.radii(st.embedding())) row.push_back(format_number(r));
    }
    row.push_back(format_number(rmin));
    row.push_back(format_number(rmax));
    row.push_back(format_number(rsum / static_cast<double>(nodes.size())));
    row.push_back(format_number(min_eigenvalue(m, nodes)));
    if (embedded) row.push_back(format_number(norms(mcf_rhs(st.embedding(), p), nodes).linf));
    row.push_back(format_number(norms(cp.riemann, nodes).linf));
    table.add_row(std::move(row));
    if (c.write_snapshots) {
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%05zu.bin", i);
      write_atomic(out / "snapshots" / name, encode_snapshot(st));
    }
  }
  write_atomic(out / "timeseries.csv", table.str());

  ojson report;
  report["command"] = "run";
  report["config"] = config_json(c, traj.schedule.dt);
  report["scenario"] = scenario_json(s);
  report["flow"] = flow_name(flow);
  report["schedule"]["dt"] = traj.schedule.dt;
  report["schedule"]["steps"] = traj.schedule.steps;
  report["schedule"]["snapshot_stride"] = traj.schedule.stride;
  report["schedule"]["snapshots_written"] = traj.snapshots.size();
  report["degenerated"] = traj.degenerated;
  if (traj.degenerated) report["degeneration"] = traj.degeneration;
  write_atomic(out / "report.json", json_text(report));

  log << "run " << s.name << ": " << traj.snapshots.size() << " snapshots, dt = "
      << format_number(traj.schedule.dt) << ", " << traj.schedule.steps << " steps -> "
      << (out / "timeseries.csv").string() << '\n';
  if (traj.degenerated) {
    write_atomic(out / "DEGENERATED", traj.degeneration + "\n");
    log << "degenerated: " << traj.degeneration << '\n';
    return kDegenerated;
  }
  return kOk;
}

int cmd_verify(const RunConfig& c, std::ostream& log) {
  if (c.checks.empty()) throw ConfigError("verify needs a non-empty 'checks' list");
  const bool all_algebraic = std::all_of(c.checks.begin(), c.checks.end(), [](const auto& n) {
    return check_info(n).tier == Tier::algebraic;
  });
  const int nlevels = c.levels.value_or(all_algebraic ? 1 : 3);
  if (!all_algebraic && nlevels < 3) {
    throw ConfigError("verify needs at least 3 levels to classify identity checks");
  }
  std::vector<int> counts = c.scenario.counts;
  if (counts.empty()) {
    const Scenario probe = make_scenario(c.scenario, c.fd_order);
    for (int a = 0; a < probe.grid->dim(); ++a) counts.push_back(probe.grid->count(a));
  }

  StudyConfig sc = study_config(c);
  for (int i = 0; i < nlevels; ++i) {
    const int factor = 1 << (nlevels - 1 - i);
    RefinementLevel level;
    for (int n : counts) {
      if (n % factor != 0 || n / factor < 4) {
        throw ConfigError("grid count " + std::to_string(n) + " does not support " +
                          std::to_string(nlevels) + " halving levels");
      }
      level.counts.push_back(n / factor);
    }
    if (c.integrator.dt) level.dt = *c.integrator.dt / (factor * factor);
    sc.levels.push_back(std::move(level));
  }
  const ConvergenceStudy st = convergence_study(sc);
  const int code = study_exit(st);

  const Scenario finest = make_scenario(c.scenario, c.fd_order);
  ojson report;
  report["command"] = "verify";
  report["config"] = config_json(c, st.levels.back().dt > 0.0 ? std::optional(st.levels.back().dt)
                                                              : std::nullopt);
  report["scenario"] = scenario_json(finest);
  report["fd_order"] = static_cast<int>(c.fd_order);
  const ojson body = study_json(st, c.fd_order);
  report["levels"] = body["levels"];
  report["checks"] = body["checks"];
  report["status"] = code == kOk ? "pass" : "fail";
  report["exit_code"] = code;
  write_atomic(fs::path(c.output_dir) / "report.json", json_text(report));

  print_table(st, log);
  log << (code == kOk ? "verify: pass" : "verify: FAIL (exactness or algebraic check)") << '\n';
  return code;
}

int cmd_sweep(const RunConfig& c, std::ostream& log) {
  if (!c.sweep || c.sweep->resolutions.size() < 3) {
    throw ConfigError("sweep needs at least 3 entries in sweep.resolutions");
  }
  if (c.checks.empty()) throw ConfigError("sweep needs a non-empty 'checks' list");
  StudyConfig sc = study_config(c);
  for (std::size_t i = 0; i < c.sweep->resolutions.size(); ++i) {
    RefinementLevel level;
    level.counts = {c.sweep->resolutions[i]};
    if (!c.sweep->dts.empty()) level.dt = c.sweep->dts[i];
    sc.levels.push_back(std::move(level));
  }
  const ConvergenceStudy st = convergence_study(sc);
  const int code = study_exit(st);

  CsvTable table({"level", "n", "h", "dt", "t", "check", "tier", "residual_linf", "residual_l2",
                  "lhs_linf", "rhs_linf", "pairwise_order", "fitted_order", "classification"});
  for (const auto& check : st.checks) {
    for (std::size_t i = 0; i < st.levels.size(); ++i) {
      const LevelResult& l = st.levels[i];
      const CheckEntry* e = l.report.find(check.name);
      table.add_row({std::to_string(i), std::to_string(l.counts.front()), format_number(l.h),
                     format_number(l.dt), format_number(l.t), check.name, tier_name(check.tier),
                     format_number(e->residual.linf), format_number(e->residual.l2),
                     e->lhs ? format_number(e->lhs->linf) : "", e->rhs ? format_number(e->rhs->linf) : "",
                     i == 0 ? "" : format_number(check.pairwise_orders[i - 1]),
                     format_number(check.fitted_order), check.classification});
    }
  }
  const fs::path out = c.output_dir;
  write_atomic(out / "convergence.csv", table.str());

  ojson report;
  report["command"] = "sweep";
  report["config"] = config_json(c, std::nullopt);
  report["fd_order"] = static_cast<int>(c.fd_order);
  const ojson body = study_json(st, c.fd_order);
  report["levels"] = body["levels"];
  report["checks"] = body["checks"];
  report["status"] = code == kOk ? "pass" : "fail";
  report["exit_code"] = code;
  write_atomic(out / "report.json", json_text(report));

  print_table(st, log);
  log << "sweep: " << (out / "convergence.csv").string() << (code == kOk ? " (pass)" : " (FAIL)")
      << '\n';
  return code;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"curvflow: curvature evolution under mean curvature flow and Ricci flow"};
  app.require_subcommand(1);
  Overrides ov;
  std::string out_dir;
  std::uint64_t seed = 0;
  int fd_order = 2;
  auto* o_out = app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  auto* o_seed = app.add_option("--seed", seed, "Seed (overrides the config seed)");
  auto* o_fd = app.add_option("--fd-order", fd_order, "Finite-difference order (2 or 4)")
                   ->check(CLI::IsMember({2, 4}));
  std::string config_path;
  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, std::ostream&);
  };
  const std::array<Sub, 3> subs{{{"run", "Integrate a flow and write a time series", cmd_run},
                                 {"verify", "Evaluate checks on a refinement ladder", cmd_verify},
                                 {"sweep", "Convergence study over sweep.resolutions", cmd_sweep}}};
  std::vector<CLI::App*> handles;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("config", config_path, "Config document")->required();
    sub->fallthrough();
    handles.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  if (*o_out) ov.out = out_dir;
  if (*o_seed) ov.seed = seed;
  if (*o_fd) ov.fd_order = fd_order;

  try {
    RunConfig c = load_config(config_path);
    apply_overrides(c, ov);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (handles[i]->parsed()) return subs[i].fn(c, out);
    }
    return kConfigError;
  } catch (const TimestepError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DegenerateMetricError& e) {
    err << "degenerated: " << e.what() << '\n';
    return kDegenerated;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace curvflow::cli
