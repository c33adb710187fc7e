// Acceptance suite: one PASS/FAIL line per criterion. Every criterion runs the
// shipped command line front end in-process on a config from tests/configs and
// reads back the artifacts it wrote.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvflow_cli/commands.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigs = CURVFLOW_CONFIG_DIR;
const fs::path kWork = CURVFLOW_WORK_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw std::runtime_error("missing CSV column " + name);
  }
  double num(std::size_t row, const std::string& name) const {
    return std::stod(rows[row][column(name)]);
  }
};

// Cells written by the tool never need quoting in these tables.
Csv read_csv(const fs::path& p) {
  Csv csv;
  std::istringstream in(slurp(p));
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (first) {
      csv.header = std::move(cells);
      first = false;
    } else {
      csv.rows.push_back(std::move(cells));
    }
  }
  return csv;
}

struct Timed {
  int code = -1;
  double seconds = 0.0;
  std::string log;
};

Timed run(const std::string& cmd, const std::string& config, const fs::path& out) {
  std::vector<std::string> args{cmd, (kConfigs / config).string(), "--out", out.string()};
  std::ostringstream log;
  std::ostringstream err;
  const auto t0 = std::chrono::steady_clock::now();
  Timed t;
  t.code = curvflow::cli::run_cli(args, log, err);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  t.log = log.str() + err.str();
  return t;
}

const json& check_entry(const json& report, const std::string& name) {
  for (const auto& c : report["checks"]) {
    if (c["name"] == name) return c;
  }
  throw std::runtime_error("report has no check " + name);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

int failures = 0;

void report_line(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void guarded(int id, const std::string& what, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report_line(id, false, what, std::string("exception: ") + e.what());
  }
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

int main() {
  fs::remove_all(kWork);
  fs::create_directories(kWork);

  // 1, 2 and the determinism half of 10 share the torus sweep.
  Timed sweep1;
  guarded(1, "gauss equation on the torus of revolution", [&] {
    sweep1 = run("sweep", "torus_sweep.json", kWork / "c1");
    const json rep = json::parse(slurp(kWork / "c1" / "report.json"));
    const json& g = check_entry(rep, "gauss_equation");
    const double order = g["fitted_order"];
    const double finest = g["residual_linf"].back();
    const bool ok = sweep1.code == 0 && order >= 1.5 && finest <= 1e-3 && sweep1.seconds <= 30.0;
    report_line(1, ok, "gauss equation on the torus of revolution",
                "fitted order " + fmt(order) + " >= 1.5, residual at 128^2 " + fmt(finest) +
                    " <= 1e-3, " + fmt(sweep1.seconds) + " s <= 30 s");
  });

  guarded(2, "tangency identity on the torus of revolution", [&] {
    const json rep = json::parse(slurp(kWork / "c1" / "report.json"));
    const json& t = check_entry(rep, "eq14");
    const double order = t["fitted_order"];
    report_line(2, order >= 1.5, "tangency identity on the torus of revolution",
                "fitted order " + fmt(order) + " >= 1.5");
  });

  guarded(3, "shrinking sphere under mean curvature flow", [&] {
    const Timed r = run("run", "sphere_run.json", kWork / "c3");
    const Csv ts = read_csv(kWork / "c3" / "timeseries.csv");
    double worst_r = 0.0;
    double worst_R = 0.0;
    for (std::size_t i = 0; i < ts.rows.size(); ++i) {
      const double t = ts.num(i, "t");
      worst_r = std::max(worst_r, rel(ts.num(i, "r_mean"), std::sqrt(1.0 - 4.0 * t)));
      worst_R = std::max(worst_R, rel(ts.num(i, "R_mean"), 2.0 / (1.0 - 4.0 * t)));
    }
    const double t_last = ts.num(ts.rows.size() - 1, "t");
    const bool ok = r.code == 0 && ts.rows.size() >= 2 && std::abs(t_last - 0.1) < 1e-12 &&
                    worst_r <= 1e-3 && worst_R <= 3e-3 && r.seconds <= 120.0;
    report_line(3, ok, "shrinking sphere under mean curvature flow",
                std::to_string(ts.rows.size()) + " rows, radius error " + fmt(worst_r) +
                    " <= 1e-3, R_mean error " + fmt(worst_R) + " <= 3e-3, " + fmt(r.seconds) +
                    " s <= 120 s");
  });

  guarded(4, "flat torus stays flat", [&] {
    const Timed r = run("run", "flat_torus_run.json", kWork / "c4");
    const Csv ts = read_csv(kWork / "c4" / "timeseries.csv");
    double riem = 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.rows.size(); ++i) {
      const double exact = std::sqrt(1.0 - 2.0 * ts.num(i, "t"));
      riem = std::max(riem, ts.num(i, "riem_inf"));
      worst = std::max({worst, rel(ts.num(i, "r1_mean"), exact), rel(ts.num(i, "r2_mean"), exact)});
    }
    const bool ok = r.code == 0 && riem <= 1e-6 && worst <= 1e-3;
    report_line(4, ok, "flat torus stays flat",
                "max |Riem| " + fmt(riem) + " <= 1e-6, radius error " + fmt(worst) + " <= 1e-3");
  });

  guarded(5, "metric evolution identity under joint refinement", [&] {
    const Timed a = run("sweep", "mcf_flat_torus_eq17.json", kWork / "c5_flat");
    const Timed b = run("sweep", "mcf_torus_eq17_eq18.json", kWork / "c5_torus");
    const json ra = json::parse(slurp(kWork / "c5_flat" / "report.json"));
    const json rb = json::parse(slurp(kWork / "c5_torus" / "report.json"));
    const json& ea = check_entry(ra, "eq17");
    const json& eb = check_entry(rb, "eq17");
    const double oa = ea["fitted_order"];
    const double ob = eb["fitted_order"];
    // the configured dt ladder must be (dt, dt/4, dt/16)
    bool ladder = true;
    for (const json* r : {&ra, &rb}) {
      const auto& dts = (*r)["config"]["sweep"]["dts"];
      ladder = ladder && dts.size() == 3 && std::abs(double(dts[1]) * 4.0 - double(dts[0])) < 1e-15 &&
               std::abs(double(dts[2]) * 16.0 - double(dts[0])) < 1e-15;
    }
    const bool ok = a.code == 0 && b.code == 0 && ladder && oa >= 1.5 && ob >= 1.5 &&
                    ea["classification"] == "identity" && eb["classification"] == "identity";
    report_line(5, ok, "metric evolution identity under joint refinement",
                "flat torus order " + fmt(oa) + " " + ea["classification"].get<std::string>() +
                    ", torus of revolution order " + fmt(ob) + " " +
                    eb["classification"].get<std::string>());
  });

  guarded(6, "extrinsic Riemann evolution identity", [&] {
    const json rb = json::parse(slurp(kWork / "c5_torus" / "report.json"));
    const json& e = check_entry(rb, "eq18");
    const double order = e["fitted_order"];
    const bool ok = e["classification"] == "identity" && order >= 1.0;
    report_line(6, ok, "extrinsic Riemann evolution identity",
                "order " + fmt(order) + " >= 1, " + e["classification"].get<std::string>());
  });

  guarded(7, "scalar curvature under Ricci flow on the round sphere", [&] {
    const Timed r = run("verify", "sphere_ricci_eq10.json", kWork / "c7");
    const json rep = json::parse(slurp(kWork / "c7" / "report.json"));
    const json& c = check_entry(rep, "eq10");
    const double t = rep["levels"].back()["t"];
    const double r2 = 1.0 - 2.0 * t;
    const double exact = 4.0 / (r2 * r2);
    const json& fin = c["finest"];
    const double lhs_l2 = fin["lhs"]["l2"];
    const double rhs_l2 = fin["rhs"]["l2"];
    const double lhs_inf = fin["lhs"]["linf"];
    const double rhs_inf = fin["rhs"]["linf"];
    const double worst =
        std::max({rel(lhs_l2, exact), rel(rhs_l2, exact), rel(lhs_inf, exact), rel(rhs_inf, exact)});
    const bool ok = r.code == 0 && c["classification"] == "identity" && worst <= 0.01;
    report_line(7, ok, "scalar curvature under Ricci flow on the round sphere",
                c["classification"].get<std::string>() + ", order " +
                    fmt(c["fitted_order"].get<double>()) + ", sides " + fmt(lhs_l2) + " / " +
                    fmt(rhs_l2) + " vs " + fmt(exact) + ", worst deviation " + fmt(worst) +
                    " <= 1%");
  });

  guarded(8, "dimension-specific scalar evolution forms", [&] {
    bool ok = true;
    std::string detail;
    const char* checks[] = {"eq23_vs_eq22", "eq24_vs_eq22", "eq25_vs_eq22"};
    for (int d = 2; d <= 4; ++d) {
      const std::string name = "random_torus_d" + std::to_string(d);
      const Timed r = run("verify", name + ".json", kWork / ("c8_d" + std::to_string(d)));
      const json rep = json::parse(slurp(kWork / ("c8_d" + std::to_string(d)) / "report.json"));
      const json& c = check_entry(rep, checks[d - 2]);
      const double relative = c["finest"]["relative"];
      const bool seeded = rep["config"]["seed"] == 7 && rep["scenario"]["params"]["eps"] == 0.05;
      ok = ok && r.code == 0 && seeded && relative <= 1e-10 && r.seconds <= 60.0;
      detail += (d > 2 ? "; " : "") + std::string("d=") + std::to_string(d) + " rel " +
                fmt(relative) + " in " + fmt(r.seconds) + " s";
    }
    report_line(8, ok, "dimension-specific scalar evolution forms", detail);
  });

  guarded(9, "scalar evolution on the sphere is reported with both sides", [&] {
    // rerun into the same directory; the report echoes the output path
    const Timed a = run("verify", "sphere_eq22.json", kWork / "c9");
    const std::string ta = slurp(kWork / "c9" / "report.json");
    const Timed b = run("verify", "sphere_eq22.json", kWork / "c9");
    const std::string tb = slurp(kWork / "c9" / "report.json");
    const json rep = json::parse(ta);
    const json& c = check_entry(rep, "eq22");
    const double t = rep["levels"].back()["t"];
    const double r2 = 1.0 - 4.0 * t;
    const double lhs_exact = 8.0 / (r2 * r2);
    const double rhs_exact = 16.0 / (r2 * r2);
    const double lhs = c["finest"]["lhs"]["l2"];
    const double rhs = c["finest"]["rhs"]["l2"];
    const bool ok = a.code == 0 && b.code == 0 && ta == tb && c["tier"] == "reported" &&
                    c["passed"] == true && rel(lhs, lhs_exact) <= 0.02 &&
                    rel(rhs, rhs_exact) <= 0.02;
    report_line(9, ok, "scalar evolution on the sphere is reported with both sides",
                "lhs " + fmt(lhs) + " vs " + fmt(lhs_exact) + ", rhs " + fmt(rhs) + " vs " +
                    fmt(rhs_exact) + ", " + c["classification"].get<std::string>() +
                    (ta == tb ? ", reports identical" : ", reports differ"));
  });

  guarded(10, "determinism and exit codes", [&] {
    const Timed again = run("sweep", "torus_sweep.json", kWork / "c10");
    const bool same = slurp(kWork / "c1" / "convergence.csv") == slurp(kWork / "c10" / "convergence.csv") &&
                      !slurp(kWork / "c10" / "convergence.csv").empty();
    const Timed bad = run("run", "malformed.json", kWork / "c10_bad");
    const Timed ext = run("run", "past_extinction.json", kWork / "c10_ext");
    const bool ok = again.code == 0 && same && bad.code == 2 && ext.code == 2;
    report_line(10, ok, "determinism and exit codes",
                std::string(same ? "sweep CSV identical" : "sweep CSV differs") +
                    ", malformed config exit " + std::to_string(bad.code) +
                    ", past-extinction exit " + std::to_string(ext.code));
  });

  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
