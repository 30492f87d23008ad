#ifndef POLYINV_BENCH_HPP
#define POLYINV_BENCH_HPP

#include <string>
#include <vector>

#include "polyinv/invariance.hpp"
#include "polyinv/network.hpp"

namespace polyinv {

enum class BenchMode { Width, Depth, Dimension };

/// One scalability sweep: a list of architectures [n_in, hidden..., n_out],
/// a seed for the random weights and the plant the controller closes the
/// loop on.
struct BenchSpec {
  BenchMode mode = BenchMode::Width;
  std::vector<std::vector<int>> architectures;
  unsigned seed = 1;
  std::string activation = "relu";
  std::string system = "integrator";  // or "spring_mass_damper"
  double safe_box = 5.0;              // integrator domain half-width
  bool run_verification = true;       // false: only #N and #theta
  int threads = 0;
};

struct BenchRow {
  std::string architecture;  // e.g. "2x16^(2)x2"
  int neurons = 0;           // #N: hidden neurons
  long params = 0;           // #theta
  int regions = -1;          // #R, -1 when verification was skipped
  double seconds = 0.0;      // t_v
  bool safe = false;
};

struct BenchResult {
  BenchMode mode = BenchMode::Width;
  std::vector<BenchRow> rows;
};

BenchSpec load_bench_spec(const std::string& path);
BenchSpec parse_bench_spec(const std::string& text,
                           const std::string& origin = "<string>");
BenchMode parse_bench_mode(const std::string& name);

/// Total parameter count sum over layers of n_l * (n_{l-1} + 1).
long param_count(const std::vector<int>& architecture);

/// Hidden neurons only.
int hidden_neuron_count(const std::vector<int>& architecture);

/// "2x16^(2)x2"-style label; repeated hidden widths are grouped.
std::string format_architecture(const std::vector<int>& architecture);

/// Seeded random network, weights scaled by 1/sqrt(fan-in).
Network make_random_network(const std::vector<int>& architecture,
                            const std::string& activation, unsigned seed);

/// Single integrator x' = u in n dimensions.
LinearSystem make_integrator(int n);

/// Chain of wagons coupled by springs and dampers; 2*wagons states.
LinearSystem make_spring_mass_damper(int wagons, double mass = 1.0,
                                     double stiffness = 1.0,
                                     double damping = 1.0);

/// Positions in [0,1], |velocity_i| <= position_i.
HPolytope spring_mass_damper_domain(int wagons);

BenchResult run_bench(const BenchSpec& spec);

/// Table in the #N / #theta / #R / t_v layout.
std::string bench_table(const BenchResult& result);

std::string bench_to_json(const BenchResult& result);

}  // namespace polyinv

#endif
