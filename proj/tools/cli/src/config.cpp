#include "curvflow_cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "curvflow/errors.hpp"
#include "curvflow/verify.hpp"

namespace curvflow::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const char* where, std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

const json& require_object(const json& j, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  return j;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
  return j.get<double>();
}

long long integer(const json& j, const char* what) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw ConfigError(std::string(what) + " must be an integer");
  }
  return j.get<long long>();
}

std::vector<int> int_list(const json& j, const char* what) {
  std::vector<int> out;
  if (j.is_number()) {
    out.push_back(static_cast<int>(integer(j, what)));
  } else if (j.is_array()) {
    for (const auto& v : j) out.push_back(static_cast<int>(integer(v, what)));
  } else {
    throw ConfigError(std::string(what) + " must be an integer or an array of integers");
  }
  for (int v : out) {
    if (v < 1) throw ConfigError(std::string(what) + " entries must be positive");
  }
  return out;
}

}  // namespace

FdOrder parse_fd_order(int p) {
  if (p == 2) return FdOrder::second;
  if (p == 4) return FdOrder::fourth;
  throw ConfigError("fd_order must be 2 or 4, got " + std::to_string(p));
}

const char* flow_name(FlowKind f) { return f == FlowKind::mcf ? "mcf" : "ricci"; }

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("malformed config: ") + err.what());
  }
  require_object(doc, "config");
  reject_unknown(doc, "config",
                 {"scenario", "grid", "fd_order", "integrator", "checks", "output_dir", "seed",
                  "flow", "snapshot_index", "levels", "write_snapshots", "sweep"});
  RunConfig c;
  try {
    if (!doc.contains("scenario")) throw ConfigError("config needs a 'scenario' object");
    const json& sc = require_object(doc.at("scenario"), "scenario");
    reject_unknown(sc, "scenario", {"name", "params"});
    if (!sc.contains("name") || !sc.at("name").is_string()) {
      throw ConfigError("scenario.name must be a string");
    }
    c.scenario.name = sc.at("name").get<std::string>();
    if (sc.contains("params")) {
      for (const auto& [key, value] : require_object(sc.at("params"), "scenario.params").items()) {
        c.scenario.params[key] = number(value, ("scenario.params." + key).c_str());
      }
    }
    if (doc.contains("grid")) {
      const json& g = require_object(doc.at("grid"), "grid");
      reject_unknown(g, "grid", {"counts"});
      if (g.contains("counts")) c.scenario.counts = int_list(g.at("counts"), "grid.counts");
    }
    if (doc.contains("fd_order")) {
      c.fd_order = parse_fd_order(static_cast<int>(integer(doc.at("fd_order"), "fd_order")));
    }
    if (doc.contains("integrator")) {
      const json& in = require_object(doc.at("integrator"), "integrator");
      reject_unknown(in, "integrator", {"scheme", "dt", "t_end", "cfl_safety", "snapshot_stride"});
      if (in.contains("scheme")) {
        if (!in.at("scheme").is_string()) throw ConfigError("integrator.scheme must be a string");
        c.integrator.scheme = parse_scheme(in.at("scheme").get<std::string>());
      }
      if (in.contains("dt")) {
        const json& dt = in.at("dt");
        if (dt.is_string()) {
          if (dt.get<std::string>() != "auto") {
            throw ConfigError("integrator.dt must be a number or \"auto\"");
          }
        } else {
          c.integrator.dt = number(dt, "integrator.dt");
          if (!(*c.integrator.dt > 0.0)) throw ConfigError("integrator.dt must be positive");
        }
      }
      if (in.contains("t_end")) c.integrator.t_end = number(in.at("t_end"), "integrator.t_end");
      if (in.contains("cfl_safety")) {
        c.integrator.cfl_safety = number(in.at("cfl_safety"), "integrator.cfl_safety");
      }
      if (in.contains("snapshot_stride")) {
        c.integrator.snapshot_stride =
            static_cast<int>(integer(in.at("snapshot_stride"), "integrator.snapshot_stride"));
      }
      if (!(c.integrator.t_end > 0.0)) throw ConfigError("integrator.t_end must be positive");
      if (!(c.integrator.cfl_safety > 0.0) || c.integrator.cfl_safety > 1.0) {
        throw ConfigError("integrator.cfl_safety must lie in (0, 1]");
      }
      if (c.integrator.snapshot_stride < 1) {
        throw ConfigError("integrator.snapshot_stride must be at least 1");
      }
    }
    if (doc.contains("checks")) {
      const json& ch = doc.at("checks");
      if (!ch.is_array()) throw ConfigError("checks must be an array of check names");
      for (const auto& v : ch) {
        if (!v.is_string()) throw ConfigError("checks must be an array of check names");
        const std::string name = v.get<std::string>();
        check_info(name);
        if (std::find(c.checks.begin(), c.checks.end(), name) == c.checks.end()) {
          c.checks.push_back(name);
        }
      }
    }
    if (doc.contains("output_dir")) {
      if (!doc.at("output_dir").is_string()) throw ConfigError("output_dir must be a string");
      c.output_dir = doc.at("output_dir").get<std::string>();
    }
    if (doc.contains("seed")) {
      const long long seed = integer(doc.at("seed"), "seed");
      if (seed < 0) throw ConfigError("seed must be non-negative");
      c.seed = static_cast<std::uint64_t>(seed);
    }
    if (doc.contains("flow")) {
      const json& f = doc.at("flow");
      if (f == "mcf") {
        c.flow = FlowKind::mcf;
      } else if (f == "ricci") {
        c.flow = FlowKind::ricci;
      } else {
        throw ConfigError("flow must be \"mcf\" or \"ricci\"");
      }
    }
    if (doc.contains("snapshot_index")) {
      const json& k = doc.at("snapshot_index");
      if (!(k.is_string() && k.get<std::string>() == "middle")) {
        const long long v = integer(k, "snapshot_index");
        if (v < 1) throw ConfigError("snapshot_index must be >= 1 or \"middle\"");
        c.snapshot_index = static_cast<std::size_t>(v);
      }
    }
    if (doc.contains("levels")) {
      const long long v = integer(doc.at("levels"), "levels");
      if (v < 1 || v > 6) throw ConfigError("levels must lie in [1, 6]");
      c.levels = static_cast<int>(v);
    }
    if (doc.contains("write_snapshots")) {
      if (!doc.at("write_snapshots").is_boolean()) {
        throw ConfigError("write_snapshots must be a boolean");
      }
      c.write_snapshots = doc.at("write_snapshots").get<bool>();
    }
    if (doc.contains("sweep")) {
      const json& sw = require_object(doc.at("sweep"), "sweep");
      reject_unknown(sw, "sweep", {"resolutions", "dts"});
      SweepConfig s;
      if (!sw.contains("resolutions")) throw ConfigError("sweep needs 'resolutions'");
      s.resolutions = int_list(sw.at("resolutions"), "sweep.resolutions");
      if (sw.contains("dts")) {
        const json& dts = sw.at("dts");
        if (!dts.is_array()) throw ConfigError("sweep.dts must be an array");
        for (const auto& v : dts) {
          const double dt = number(v, "sweep.dts");
          if (!(dt > 0.0)) throw ConfigError("sweep.dts entries must be positive");
          s.dts.push_back(dt);
        }
        if (s.dts.size() != s.resolutions.size()) {
          throw ConfigError("sweep.dts must have one entry per resolution");
        }
      }
      c.sweep = std::move(s);
    }
  } catch (const json::exception& err) {
    throw ConfigError(std::string("malformed config: ") + err.what());
  }
  c.scenario.seed = c.seed;
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_overrides(RunConfig& c, const Overrides& o) {
  if (o.out) c.output_dir = *o.out;
  if (o.seed) {
    c.seed = *o.seed;
    c.scenario.seed = *o.seed;
    auto it = c.scenario.params.find("seed");
    if (it != c.scenario.params.end()) it->second = static_cast<double>(*o.seed);
  }
  if (o.fd_order) c.fd_order = parse_fd_order(*o.fd_order);
}

}  // namespace curvflow::cli
