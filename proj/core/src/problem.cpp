#include "polyinv/problem.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "polyinv/errors.hpp"

namespace polyinv {

namespace {

using nlohmann::json;

[[noreturn]] void fail_parse(const std::string& origin, const std::string& msg) {
  throw ParseError(origin + ": " + msg);
}

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ParseError(where + ": expected a list of rows");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  Eigen::MatrixXd M(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ParseError(where + ": row " + std::to_string(r) + " has " +
                       std::to_string(j[r].size()) + " entries, expected " +
                       std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        throw ParseError(where + ": entry (" + std::to_string(r) + "," +
                         std::to_string(c) + ") is not a number");
      }
      M(r, c) = j[r][c].get<double>();
    }
  }
  return M;
}

Eigen::VectorXd parse_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected a list of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ParseError(where + ": entry " + std::to_string(i) +
                       " is not a number");
    }
    v(i) = j[i].get<double>();
  }
  return v;
}

PWAActivation parse_activation(const json& j, const std::string& where) {
  if (j.is_string()) return parse_activation_spec(j.get<std::string>());
  if (j.is_object()) {
    PWAActivation a;
    if (!j.contains("breakpoints") || !j.contains("slopes") ||
        !j.contains("intercepts")) {
      throw ParseError(where +
                       ": activation object needs breakpoints, slopes and "
                       "intercepts");
    }
    a.breakpoints = parse_vector(j.at("breakpoints"), where + ".breakpoints");
    a.slopes = parse_vector(j.at("slopes"), where + ".slopes");
    a.intercepts = parse_vector(j.at("intercepts"), where + ".intercepts");
    a.validate();  // may throw NonContinuousActivation
    return a;
  }
  throw ParseError(where + ": activation must be a string or an object");
}

HPolytope parse_polytope(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("C") || !j.contains("d")) {
    throw ParseError(where + ": expected an object with C and d");
  }
  Eigen::MatrixXd C = parse_matrix(j.at("C"), where + ".C");
  Eigen::VectorXd d = parse_vector(j.at("d"), where + ".d");
  if (C.rows() != d.size()) {
    throw DimensionMismatch(where + ": C has " + std::to_string(C.rows()) +
                            " rows but d has " + std::to_string(d.size()) +
                            " entries");
  }
  return HPolytope(std::move(C), std::move(d));
}

}  // namespace

PWAActivation parse_activation_spec(const std::string& name) {
  if (name == "identity") return PWAActivation::identity();
  if (name == "relu") return PWAActivation::relu();
  if (name == "leaky_relu") return PWAActivation::leaky_relu(0.01);
  const std::string prefix = "leaky_relu:";
  if (name.rfind(prefix, 0) == 0) {
    try {
      return PWAActivation::leaky_relu(std::stod(name.substr(prefix.size())));
    } catch (const std::exception&) {
      throw ParseError("activation: bad slope in '" + name + "'");
    }
  }
  const std::string sat = "saturation:";
  if (name.rfind(sat, 0) == 0) {
    std::string rest = name.substr(sat.size());
    auto comma = rest.find(',');
    if (comma == std::string::npos) {
      throw ParseError("activation: saturation needs 'saturation:lo,hi'");
    }
    try {
      return PWAActivation::saturation(std::stod(rest.substr(0, comma)),
                                       std::stod(rest.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ParseError("activation: bad bounds in '" + name + "'");
    }
  }
  throw ParseError("activation: unknown shorthand '" + name + "'");
}

Problem parse_problem(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail_parse(origin, "line " + std::to_string(line_of_offset(text, e.byte)) +
                           ": " + e.what());
  }
  if (!doc.is_object()) fail_parse(origin, "top level must be an object");
  if (!doc.contains("format_version")) {
    fail_parse(origin, "missing format_version");
  }
  if (doc.at("format_version").get<std::string>() != kProblemFormatVersion) {
    fail_parse(origin, "unsupported format_version '" +
                           doc.at("format_version").dump() + "'");
  }

  Problem p;

  if (!doc.contains("system")) fail_parse(origin, "missing system");
  p.system.A = parse_matrix(doc.at("system").at("A"), "system.A");
  p.system.B = parse_matrix(doc.at("system").at("B"), "system.B");
  p.system.validate();

  if (!doc.contains("network") || !doc.at("network").contains("layers")) {
    fail_parse(origin, "missing network.layers");
  }
  const json& layers = doc.at("network").at("layers");
  if (!layers.is_array() || layers.empty()) {
    fail_parse(origin, "network.layers must be a non-empty list");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::string where = "network.layers[" + std::to_string(l) + "]";
    Layer layer;
    layer.W = parse_matrix(layers[l].at("W"), where + ".W");
    layer.b = parse_vector(layers[l].at("b"), where + ".b");
    if (layer.W.rows() != layer.b.size()) {
      throw DimensionMismatch(where + ": W has " +
                              std::to_string(layer.W.rows()) + " rows but b has " +
                              std::to_string(layer.b.size()) + " entries");
    }
    layer.activation = layers[l].contains("activation")
                           ? parse_activation(layers[l].at("activation"),
                                              where + ".activation")
                           : PWAActivation::identity();
    p.network.layers.push_back(std::move(layer));
  }
  p.network.validate();

  if (!doc.contains("safe_set")) fail_parse(origin, "missing safe_set");
  p.safe_set = parse_polytope(doc.at("safe_set"), "safe_set");

  if (doc.contains("obstacles")) {
    const json& obs = doc.at("obstacles");
    if (!obs.is_array()) fail_parse(origin, "obstacles must be a list");
    for (std::size_t k = 0; k < obs.size(); ++k) {
      HPolytope o = parse_polytope(obs[k], "obstacles[" + std::to_string(k) + "]");
      o.open = true;
      p.obstacles.push_back(std::move(o));
    }
  }

  if (doc.contains("options")) {
    const json& opt = doc.at("options");
    if (opt.contains("prune")) p.options.prune = opt.at("prune").get<bool>();
    if (opt.contains("early_exit"))
      p.options.early_exit = opt.at("early_exit").get<bool>();
    if (opt.contains("seed"))
      p.options.seed = opt.at("seed").get<unsigned>();
    if (opt.contains("tolerances")) {
      const json& t = opt.at("tolerances");
      if (t.contains("lp")) p.options.tol.lp = t.at("lp").get<double>();
      if (t.contains("face")) p.options.tol.face = t.at("face").get<double>();
      if (t.contains("radius")) p.options.tol.radius = t.at("radius").get<double>();
      if (t.contains("margin")) p.options.tol.margin = t.at("margin").get<double>();
    }
  }

  // Cross-object dimension checks.
  const int n = p.system.state_dim();
  if (p.network.n_in() != n) {
    throw DimensionMismatch("network input dimension " +
                            std::to_string(p.network.n_in()) +
                            " does not match state dimension " +
                            std::to_string(n));
  }
  if (p.network.n_out() != p.system.input_dim()) {
    throw DimensionMismatch("network output dimension " +
                            std::to_string(p.network.n_out()) +
                            " does not match input dimension " +
                            std::to_string(p.system.input_dim()));
  }
  if (p.safe_set.dim() != n) {
    throw DimensionMismatch("safe_set dimension " +
                            std::to_string(p.safe_set.dim()) +
                            " does not match state dimension " +
                            std::to_string(n));
  }
  if (is_empty(p.safe_set, p.options.tol)) {
    throw EmptyDomain("safe_set is empty");
  }

  // Obstacles must sit inside the safe set: max of each safe-set row over
  // the obstacle closure must stay below the bound.
  for (std::size_t k = 0; k < p.obstacles.size(); ++k) {
    const HPolytope& o = p.obstacles[k];
    if (o.dim() != n) {
      throw DimensionMismatch("obstacles[" + std::to_string(k) +
                              "] dimension " + std::to_string(o.dim()) +
                              " does not match state dimension " +
                              std::to_string(n));
    }
    if (is_empty(o, p.options.tol)) continue;  // vacuous obstacle is harmless
    for (int i = 0; i < p.safe_set.rows(); ++i) {
      LPResult r = solve_lp(p.safe_set.C.row(i).transpose(), o.C, o.d,
                            LPSense::Maximize, p.options.tol);
      if (r.status == LPStatus::Unbounded ||
          (r.status == LPStatus::Optimal &&
           r.objective > p.safe_set.d(i) + 1e-9)) {
        throw ObstacleOutsideSafeSet(
            "obstacles[" + std::to_string(k) +
            "] is not contained in the safe set (violates row " +
            std::to_string(i) + ")");
      }
    }
  }

  return p;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path);
}

}  // namespace polyinv
