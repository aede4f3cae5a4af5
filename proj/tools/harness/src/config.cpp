#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "pathcause/harness.hpp"

namespace pathcause::harness {
namespace {

void reject_unknown(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": invalid value '" + YAML::Dump(node) + "'");
  }
}

// yaml-cpp happily reads "-3" into an unsigned; guard against that.
std::size_t count(const YAML::Node& node, const std::string& where) {
  const auto v = scalar<long long>(node, where);
  if (v < 0) throw ConfigError(where + ": must be non-negative");
  return static_cast<std::size_t>(v);
}

RegimeCoefficients parse_regime(const YAML::Node& node, const std::string& where,
                                const RegimeCoefficients& base) {
  reject_unknown(node, where, {"theta_x", "theta_xx", "theta_yx", "theta_y", "theta_yy", "theta_xy"});
  RegimeCoefficients r = base;
  auto read = [&](const char* key, double& dst) {
    if (node[key]) dst = scalar<double>(node[key], where + "." + key);
  };
  read("theta_x", r.theta_x);
  read("theta_xx", r.theta_xx);
  read("theta_yx", r.theta_yx);
  read("theta_y", r.theta_y);
  read("theta_yy", r.theta_yy);
  read("theta_xy", r.theta_xy);
  return r;
}

PredictorSettings parse_predictor(const YAML::Node& node, const std::string& where, PredictorSettings s) {
  reject_unknown(node, where, {"kind", "order", "grid_points", "lambda", "alpha"});
  if (node["kind"]) {
    try {
      s.kind = parse_predictor_kind(scalar<std::string>(node["kind"], where + ".kind"));
    } catch (const PredictorError& e) {
      throw ConfigError(where + ".kind: " + e.what());
    }
  }
  if (node["order"]) s.order = count(node["order"], where + ".order");
  if (node["grid_points"]) s.grid_points = count(node["grid_points"], where + ".grid_points");
  if (node["lambda"]) s.shrink.lambda = scalar<double>(node["lambda"], where + ".lambda");
  if (node["alpha"]) s.shrink.alpha = scalar<double>(node["alpha"], where + ".alpha");
  return s;
}

const char* format_name(Format f) { return f == Format::kCsv ? "csv" : "json"; }

const char* direction_name(DirectionSet d) {
  switch (d) {
    case DirectionSet::kYtoX:
      return "yx";
    case DirectionSet::kXtoY:
      return "xy";
    case DirectionSet::kBoth:
      return "both";
  }
  return "both";
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    if (model) model->validate();
    estimator.complete.validate();
    estimator.restricted.validate();
    ReferenceClass{reference_points, true}.validate();
    // Building the predictors validates the context and grid sizes.
    CausalEstimator probe(estimator, false);
    (void)probe;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (estimator.alphabet_size != 2) throw ConfigError("only binary alphabets are supported");
}

std::vector<Direction> ExperimentConfig::direction_list() const {
  switch (directions) {
    case DirectionSet::kYtoX:
      return {Direction::kYtoX};
    case DirectionSet::kXtoY:
      return {Direction::kXtoY};
    case DirectionSet::kBoth:
      break;
  }
  return {Direction::kYtoX, Direction::kXtoY};
}

namespace {

ReferenceClass default_reference(const PredictorSettings& s, const std::vector<double>& override_points) {
  if (!override_points.empty()) return ReferenceClass::grid(override_points);
  if (s.kind == PredictorKind::kGrid) return ReferenceClass::grid(ParameterGrid::uniform(s.grid_points).points);
  return ReferenceClass::continuum();
}

}  // namespace

ReferenceClass ExperimentConfig::complete_reference() const {
  return default_reference(estimator.complete, reference_points);
}

ReferenceClass ExperimentConfig::restricted_reference() const {
  return default_reference(estimator.restricted, reference_points);
}

ExperimentConfig default_fig1_config() {
  ExperimentConfig cfg;
  ProcessParams p;
  p.regime1 = RegimeCoefficients{-0.5, 0.5, 2.5, -0.5, 0.5, 0.0};
  p.regime2 = RegimeCoefficients{-0.5, 0.5, 0.5, -0.5, 0.5, 2.0};
  p.n = 2000;
  p.change_point = 1000;
  cfg.model = p;
  return cfg;
}

ExperimentConfig example1_config(std::size_t n) {
  ExperimentConfig cfg;
  cfg.model = example1_params(n);
  return cfg;
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  ExperimentConfig cfg = default_fig1_config();
  if (root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  reject_unknown(root, "config", {"preset", "model", "estimator", "reference", "run"});

  if (root["preset"]) {
    const auto preset = scalar<std::string>(root["preset"], "preset");
    if (preset == "fig1") {
      cfg = default_fig1_config();
    } else if (preset == "example1") {
      cfg = example1_config(10000);
    } else {
      throw ConfigError("preset: unknown preset '" + preset + "'");
    }
  }

  if (const auto m = root["model"]) {
    if (m.IsNull()) {
      cfg.model.reset();
    } else {
      reject_unknown(m, "model", {"n", "change_point", "regime1", "regime2"});
      ProcessParams p = cfg.model.value_or(ProcessParams{});
      if (m["n"]) p.n = count(m["n"], "model.n");
      if (m["change_point"]) {
        if (m["change_point"].IsNull()) {
          p.change_point.reset();
        } else {
          p.change_point = count(m["change_point"], "model.change_point");
        }
      }
      if (m["regime1"]) {
        p.regime1 = parse_regime(m["regime1"], "model.regime1", p.regime1);
        if (!m["regime2"]) p.regime2 = p.regime1;
      }
      if (m["regime2"]) p.regime2 = parse_regime(m["regime2"], "model.regime2", p.regime2);
      cfg.model = p;
    }
  }

  if (const auto e = root["estimator"]) {
    reject_unknown(e, "estimator", {"complete", "restricted"});
    if (e["complete"]) cfg.estimator.complete = parse_predictor(e["complete"], "estimator.complete", cfg.estimator.complete);
    if (e["restricted"]) {
      cfg.estimator.restricted = parse_predictor(e["restricted"], "estimator.restricted", cfg.estimator.restricted);
    }
  }

  if (const auto r = root["reference"]) {
    reject_unknown(r, "reference", {"points"});
    if (r["points"]) {
      if (!r["points"].IsSequence()) throw ConfigError("reference.points: expected a list");
      cfg.reference_points.clear();
      for (const auto& v : r["points"]) cfg.reference_points.push_back(scalar<double>(v, "reference.points"));
    }
  }

  if (const auto r = root["run"]) {
    reject_unknown(r, "run", {"seed", "direction", "filter", "format"});
    if (r["seed"]) cfg.seed = static_cast<std::uint64_t>(count(r["seed"], "run.seed"));
    if (r["direction"]) {
      const auto d = scalar<std::string>(r["direction"], "run.direction");
      if (d == "yx") {
        cfg.directions = DirectionSet::kYtoX;
      } else if (d == "xy") {
        cfg.directions = DirectionSet::kXtoY;
      } else if (d == "both") {
        cfg.directions = DirectionSet::kBoth;
      } else {
        throw ConfigError("run.direction: expected yx, xy or both");
      }
    }
    if (r["filter"]) {
      try {
        cfg.filter = parse_filter_variant(scalar<std::string>(r["filter"], "run.filter"));
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("run.filter: ") + ex.what());
      }
    }
    if (r["format"]) {
      const auto f = scalar<std::string>(r["format"], "run.format");
      if (f == "csv") {
        cfg.format = Format::kCsv;
      } else if (f == "json") {
        cfg.format = Format::kJson;
      } else {
        throw ConfigError("run.format: expected csv or json");
      }
    }
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  if (cfg.model) {
    const auto& p = *cfg.model;
    auto regime = [&](const char* name, const RegimeCoefficients& r) {
      out << YAML::Key << name << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "theta_x" << YAML::Value << r.theta_x;
      out << YAML::Key << "theta_xx" << YAML::Value << r.theta_xx;
      out << YAML::Key << "theta_yx" << YAML::Value << r.theta_yx;
      out << YAML::Key << "theta_y" << YAML::Value << r.theta_y;
      out << YAML::Key << "theta_yy" << YAML::Value << r.theta_yy;
      out << YAML::Key << "theta_xy" << YAML::Value << r.theta_xy;
      out << YAML::EndMap;
    };
    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "n" << YAML::Value << p.n;
    out << YAML::Key << "change_point" << YAML::Value;
    if (p.change_point) {
      out << *p.change_point;
    } else {
      out << YAML::Null;
    }
    regime("regime1", p.regime1);
    regime("regime2", p.regime2);
    out << YAML::EndMap;
  } else {
    out << YAML::Key << "model" << YAML::Value << YAML::Null;
  }

  auto predictor = [&](const char* name, const PredictorSettings& s) {
    out << YAML::Key << name << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(s.kind));
    out << YAML::Key << "order" << YAML::Value << s.order;
    out << YAML::Key << "grid_points" << YAML::Value << s.grid_points;
    out << YAML::Key << "lambda" << YAML::Value << s.shrink.lambda;
    out << YAML::Key << "alpha" << YAML::Value << s.shrink.alpha;
    out << YAML::EndMap;
  };
  out << YAML::Key << "estimator" << YAML::Value << YAML::BeginMap;
  predictor("complete", cfg.estimator.complete);
  predictor("restricted", cfg.estimator.restricted);
  out << YAML::EndMap;

  if (!cfg.reference_points.empty()) {
    out << YAML::Key << "reference" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "points" << YAML::Value << YAML::Flow << cfg.reference_points;
    out << YAML::EndMap;
  }

  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "direction" << YAML::Value << direction_name(cfg.directions);
  out << YAML::Key << "filter" << YAML::Value << std::string(to_string(cfg.filter));
  out << YAML::Key << "format" << YAML::Value << format_name(cfg.format);
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace pathcause::harness
