#ifndef POLYINV_NETWORK_HPP
#define POLYINV_NETWORK_HPP

#include <Eigen/Dense>
#include <vector>

namespace polyinv {

/// Scalar continuous piecewise-affine activation with K segments separated
/// by K-1 strictly increasing breakpoints. Segment j (0-based) applies on
/// (m_{j-1}, m_j]: a point exactly on a breakpoint belongs to the lower
/// segment, which keeps patterns deterministic; continuity makes the choice
/// value-irrelevant.
struct PWAActivation {
  Eigen::VectorXd breakpoints;
  Eigen::VectorXd slopes;
  Eigen::VectorXd intercepts;

  static PWAActivation identity();
  static PWAActivation relu();
  static PWAActivation leaky_relu(double alpha);
  /// clamp(x, lo, hi): flat / linear / flat.
  static PWAActivation saturation(double lo, double hi);

  int segments() const { return static_cast<int>(slopes.size()); }
  bool is_identity() const;

  int segment_of(double x) const;
  double value(double x) const;

  /// Checks strictly increasing breakpoints and continuity at each one.
  /// Throws NonContinuousActivation / Error.
  void validate() const;
};

struct Layer {
  Eigen::MatrixXd W;
  Eigen::VectorXd b;
  PWAActivation activation;

  int out_dim() const { return static_cast<int>(W.rows()); }
  int in_dim() const { return static_cast<int>(W.cols()); }
};

struct Network {
  std::vector<Layer> layers;

  int n_in() const { return layers.empty() ? 0 : layers.front().in_dim(); }
  int n_out() const { return layers.empty() ? 0 : layers.back().out_dim(); }
  int depth() const { return static_cast<int>(layers.size()); }

  /// Dimension chaining, bias lengths, activation validity. Throws.
  void validate() const;

  /// Total number of breakpoint hyperplanes, sum over neurons of K-1.
  int breakpoint_count() const;
};

/// Per layer, per neuron: the 0-based index of the active segment.
using ActivationPattern = std::vector<std::vector<int>>;

/// Affine maps z^(l) = E[l] x + G[l] accumulated through the layers a
/// pattern covers; E[0] = I, G[0] = 0.
struct ActiveParams {
  std::vector<Eigen::MatrixXd> E;
  std::vector<Eigen::VectorXd> G;

  int depth() const { return static_cast<int>(E.size()) - 1; }
  const Eigen::MatrixXd& output_E() const { return E.back(); }
  const Eigen::VectorXd& output_G() const { return G.back(); }

  static ActiveParams seed(int n_in);
};

struct ActivationEval {
  double value;
  int segment;
  double slope;
  double intercept;
};

ActivationEval eval_activation(const PWAActivation& a, double x);

struct ForwardResult {
  Eigen::VectorXd output;
  std::vector<Eigen::VectorXd> preactivations;  // one per layer
  ActivationPattern pattern;
};

ForwardResult forward(const Network& net, const Eigen::VectorXd& x);

/// Builds E^(l), G^(l) for l = 1..pattern.size() by the slope-selection
/// recursion E^(l) = C W E^(l-1), G^(l) = C (W G^(l-1) + b) + d.
ActiveParams active_params_from_pattern(const Network& net,
                                        const ActivationPattern& pattern);

/// Extends params (depth l-1) by one layer under the given per-neuron
/// segment choice.
void extend_active_params(const Network& net, ActiveParams& params,
                          const std::vector<int>& layer_pattern);

/// Equivalent to active_params_from_pattern(net, forward(net, x).pattern);
/// the point should sit strictly inside a linear region.
ActiveParams active_params_at_point(const Network& net,
                                    const Eigen::VectorXd& x);

}  // namespace polyinv

#endif
