#include "polyinv/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "polyinv/errors.hpp"
#include "polyinv/problem.hpp"

namespace polyinv {

namespace {

using nlohmann::json;

Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng,
                              double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd M(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) M(r, c) = scale * normal(rng);
  }
  return M;
}

}  // namespace

BenchMode parse_bench_mode(const std::string& name) {
  if (name == "width") return BenchMode::Width;
  if (name == "depth") return BenchMode::Depth;
  if (name == "dimension") return BenchMode::Dimension;
  throw ParseError("bench mode must be width, depth or dimension, got '" +
                   name + "'");
}

BenchSpec parse_bench_spec(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  BenchSpec spec;
  if (doc.contains("mode")) {
    spec.mode = parse_bench_mode(doc.at("mode").get<std::string>());
  }
  if (!doc.contains("architectures") || !doc.at("architectures").is_array()) {
    throw ParseError(origin + ": missing architectures list");
  }
  for (const auto& arch : doc.at("architectures")) {
    std::vector<int> a;
    for (const auto& v : arch) a.push_back(v.get<int>());
    if (a.size() < 2) {
      throw ParseError(origin + ": an architecture needs at least [n_in, n_out]");
    }
    spec.architectures.push_back(std::move(a));
  }
  if (doc.contains("seed")) spec.seed = doc.at("seed").get<unsigned>();
  if (doc.contains("activation"))
    spec.activation = doc.at("activation").get<std::string>();
  if (doc.contains("system")) spec.system = doc.at("system").get<std::string>();
  if (doc.contains("safe_box")) spec.safe_box = doc.at("safe_box").get<double>();
  if (doc.contains("verify"))
    spec.run_verification = doc.at("verify").get<bool>();
  if (doc.contains("threads")) spec.threads = doc.at("threads").get<int>();
  return spec;
}

BenchSpec load_bench_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bench_spec(buf.str(), path);
}

long param_count(const std::vector<int>& architecture) {
  long total = 0;
  for (std::size_t l = 1; l < architecture.size(); ++l) {
    total += static_cast<long>(architecture[l]) * (architecture[l - 1] + 1);
  }
  return total;
}

int hidden_neuron_count(const std::vector<int>& architecture) {
  int total = 0;
  for (std::size_t l = 1; l + 1 < architecture.size(); ++l) {
    total += architecture[l];
  }
  return total;
}

std::string format_architecture(const std::vector<int>& architecture) {
  std::ostringstream out;
  out << architecture.front();
  std::size_t l = 1;
  while (l + 1 < architecture.size()) {
    int width = architecture[l];
    std::size_t run = 1;
    while (l + run + 1 < architecture.size() &&
           architecture[l + run] == width) {
      ++run;
    }
    out << "x" << width;
    if (run > 1) out << "^(" << run << ")";
    l += run;
  }
  out << "x" << architecture.back();
  return out.str();
}

Network make_random_network(const std::vector<int>& architecture,
                            const std::string& activation, unsigned seed) {
  if (architecture.size() < 2) {
    throw Error("make_random_network: need at least [n_in, n_out]");
  }
  PWAActivation act = parse_activation_spec(activation);
  std::mt19937_64 rng(seed);
  Network net;
  for (std::size_t l = 1; l < architecture.size(); ++l) {
    Layer layer;
    double scale = 1.0 / std::sqrt(double(architecture[l - 1]));
    layer.W = random_matrix(architecture[l], architecture[l - 1], rng, scale);
    layer.b = random_matrix(architecture[l], 1, rng, scale);
    layer.activation =
        (l + 1 < architecture.size()) ? act : PWAActivation::identity();
    net.layers.push_back(std::move(layer));
  }
  net.validate();
  return net;
}

LinearSystem make_integrator(int n) {
  LinearSystem sys;
  sys.A = Eigen::MatrixXd::Zero(n, n);
  sys.B = Eigen::MatrixXd::Identity(n, n);
  return sys;
}

LinearSystem make_spring_mass_damper(int wagons, double mass, double stiffness,
                                     double damping) {
  const int n = wagons;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double right = (i + 1 < n) ? stiffness : 0.0;
    K(i, i) = stiffness + right;
    if (i + 1 < n) {
      K(i, i + 1) = -stiffness;
      K(i + 1, i) = -stiffness;
    }
  }
  Eigen::MatrixXd C = (damping / stiffness) * K;  // same coupling structure
  Eigen::MatrixXd Minv = Eigen::MatrixXd::Identity(n, n) / mass;

  LinearSystem sys;
  sys.A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  sys.A.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  sys.A.bottomLeftCorner(n, n) = -Minv * K;
  sys.A.bottomRightCorner(n, n) = -Minv * C;
  sys.B = Eigen::MatrixXd::Zero(2 * n, n);
  sys.B.bottomRows(n) = Minv;
  return sys;
}

HPolytope spring_mass_damper_domain(int wagons) {
  const int n = wagons;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(4 * n, 2 * n);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(4 * n);
  for (int i = 0; i < n; ++i) {
    C(4 * i, i) = 1.0;  // position <= 1
    d(4 * i) = 1.0;
    C(4 * i + 1, i) = -1.0;  // position >= 0
    d(4 * i + 1) = 0.0;
    C(4 * i + 2, i) = -1.0;  // velocity <= position
    C(4 * i + 2, n + i) = 1.0;
    C(4 * i + 3, i) = -1.0;  // -velocity <= position
    C(4 * i + 3, n + i) = -1.0;
  }
  return HPolytope(std::move(C), std::move(d));
}

BenchResult run_bench(const BenchSpec& spec) {
  BenchResult result;
  result.mode = spec.mode;
  unsigned row_index = 0;
  for (const std::vector<int>& arch : spec.architectures) {
    BenchRow row;
    row.architecture = format_architecture(arch);
    row.neurons = hidden_neuron_count(arch);
    row.params = param_count(arch);

    if (spec.run_verification) {
      Network net =
          make_random_network(arch, spec.activation, spec.seed + row_index);
      LinearSystem sys;
      HPolytope S;
      if (spec.system == "spring_mass_damper") {
        int wagons = arch.back();
        if (arch.front() != 2 * wagons) {
          throw Error("bench: spring_mass_damper expects n_in = 2 * n_out, got " +
                      row.architecture);
        }
        sys = make_spring_mass_damper(wagons);
        S = spring_mass_damper_domain(wagons);
      } else if (spec.system == "integrator") {
        if (arch.front() != arch.back()) {
          throw Error("bench: integrator expects n_in = n_out, got " +
                      row.architecture);
        }
        sys = make_integrator(arch.front());
        S = HPolytope::cube(arch.front(), -spec.safe_box, spec.safe_box);
      } else {
        throw Error("bench: unknown system '" + spec.system + "'");
      }

      VerifyOptions opts;
      opts.threads = spec.threads;
      opts.probe_seed = spec.seed;
      auto t0 = std::chrono::steady_clock::now();
      Verdict verdict = verify(sys, net, S, {}, opts);
      row.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      row.regions = verdict.stats.region_count;
      row.safe = verdict.safe;
    }
    result.rows.push_back(std::move(row));
    ++row_index;
  }
  return result;
}

std::string bench_table(const BenchResult& result) {
  std::ostringstream out;
  const char* mode = result.mode == BenchMode::Width
                         ? "width"
                         : (result.mode == BenchMode::Depth ? "depth"
                                                            : "dimension");
  out << "Scalability w.r.t. " << mode << "\n";
  out << "Architecture        #N      #theta    #R      t_v [s]\n";
  for (const BenchRow& row : result.rows) {
    out << row.architecture;
    for (std::size_t pad = row.architecture.size(); pad < 20; ++pad) out << ' ';
    std::ostringstream n, p, r;
    n << row.neurons;
    p << row.params;
    if (row.regions >= 0)
      r << row.regions;
    else
      r << "-";
    out << n.str();
    for (std::size_t pad = n.str().size(); pad < 8; ++pad) out << ' ';
    out << p.str();
    for (std::size_t pad = p.str().size(); pad < 10; ++pad) out << ' ';
    out << r.str();
    for (std::size_t pad = r.str().size(); pad < 8; ++pad) out << ' ';
    if (row.regions >= 0) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", row.seconds);
      out << buf;
    } else {
      out << "-";
    }
    out << "\n";
  }
  return out.str();
}

std::string bench_to_json(const BenchResult& result) {
  nlohmann::ordered_json j;
  j["mode"] = result.mode == BenchMode::Width
                  ? "width"
                  : (result.mode == BenchMode::Depth ? "depth" : "dimension");
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const BenchRow& row : result.rows) {
    nlohmann::ordered_json r;
    r["architecture"] = row.architecture;
    r["neurons"] = row.neurons;
    r["params"] = row.params;
    if (row.regions >= 0) {
      r["regions"] = row.regions;
      r["t_v_seconds"] = row.seconds;
      r["safe"] = row.safe;
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace polyinv
