#include "polyinv/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polyinv/errors.hpp"

namespace polyinv {

PWAActivation PWAActivation::identity() {
  PWAActivation a;
  a.breakpoints.resize(0);
  a.slopes = Eigen::VectorXd::Ones(1);
  a.intercepts = Eigen::VectorXd::Zero(1);
  return a;
}

PWAActivation PWAActivation::relu() { return leaky_relu(0.0); }

PWAActivation PWAActivation::leaky_relu(double alpha) {
  PWAActivation a;
  a.breakpoints = Eigen::VectorXd::Zero(1);
  a.slopes.resize(2);
  a.slopes << alpha, 1.0;
  a.intercepts = Eigen::VectorXd::Zero(2);
  return a;
}

PWAActivation PWAActivation::saturation(double lo, double hi) {
  PWAActivation a;
  a.breakpoints.resize(2);
  a.breakpoints << lo, hi;
  a.slopes.resize(3);
  a.slopes << 0.0, 1.0, 0.0;
  a.intercepts.resize(3);
  a.intercepts << lo, 0.0, hi;
  return a;
}

bool PWAActivation::is_identity() const {
  return breakpoints.size() == 0 && slopes.size() == 1 && slopes(0) == 1.0 &&
         intercepts(0) == 0.0;
}

int PWAActivation::segment_of(double x) const {
  // count of breakpoints strictly below x: left-open, right-closed bins
  const double* begin = breakpoints.data();
  const double* end = begin + breakpoints.size();
  return static_cast<int>(std::lower_bound(begin, end, x) - begin);
}

double PWAActivation::value(double x) const {
  int j = segment_of(x);
  return slopes(j) * x + intercepts(j);
}

void PWAActivation::validate() const {
  if (slopes.size() != intercepts.size() ||
      slopes.size() != breakpoints.size() + 1 || slopes.size() == 0) {
    throw Error("PWAActivation: need K slopes, K intercepts, K-1 breakpoints");
  }
  for (int k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints(k) < breakpoints(k + 1))) {
      throw Error("PWAActivation: breakpoints must be strictly increasing");
    }
  }
  for (int k = 0; k < breakpoints.size(); ++k) {
    double left = slopes(k) * breakpoints(k) + intercepts(k);
    double right = slopes(k + 1) * breakpoints(k) + intercepts(k + 1);
    if (std::abs(left - right) > 1e-12 * std::max(1.0, std::abs(left))) {
      throw NonContinuousActivation(
          "PWAActivation: discontinuity at breakpoint " + std::to_string(k) +
          " (" + std::to_string(left) + " vs " + std::to_string(right) + ")");
    }
  }
}

void Network::validate() const {
  if (layers.empty()) throw Error("Network: needs at least one layer");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    if (layer.W.rows() != layer.b.size()) {
      throw DimensionMismatch("Network: layer " + std::to_string(l) + " has " +
                              std::to_string(layer.W.rows()) +
                              " weight rows but " +
                              std::to_string(layer.b.size()) + " biases");
    }
    if (l > 0 && layer.W.cols() != layers[l - 1].W.rows()) {
      throw DimensionMismatch(
          "Network: layer " + std::to_string(l) + " expects " +
          std::to_string(layer.W.cols()) + " inputs but layer " +
          std::to_string(l - 1) + " emits " +
          std::to_string(layers[l - 1].W.rows()));
    }
    layer.activation.validate();
  }
}

int Network::breakpoint_count() const {
  int count = 0;
  for (const Layer& layer : layers) {
    count += layer.out_dim() *
             static_cast<int>(layer.activation.breakpoints.size());
  }
  return count;
}

ActiveParams ActiveParams::seed(int n_in) {
  ActiveParams p;
  p.E.push_back(Eigen::MatrixXd::Identity(n_in, n_in));
  p.G.push_back(Eigen::VectorXd::Zero(n_in));
  return p;
}

ActivationEval eval_activation(const PWAActivation& a, double x) {
  int j = a.segment_of(x);
  return {a.slopes(j) * x + a.intercepts(j), j, a.slopes(j), a.intercepts(j)};
}

ForwardResult forward(const Network& net, const Eigen::VectorXd& x) {
  if (x.size() != net.n_in()) {
    throw DimensionMismatch("forward: input has " + std::to_string(x.size()) +
                            " entries, network expects " +
                            std::to_string(net.n_in()));
  }
  ForwardResult r;
  r.preactivations.reserve(net.layers.size());
  r.pattern.reserve(net.layers.size());
  Eigen::VectorXd z = x;
  for (const Layer& layer : net.layers) {
    Eigen::VectorXd pre = layer.W * z + layer.b;
    std::vector<int> segs(pre.size());
    Eigen::VectorXd post(pre.size());
    for (int i = 0; i < pre.size(); ++i) {
      ActivationEval e = eval_activation(layer.activation, pre(i));
      post(i) = e.value;
      segs[i] = e.segment;
    }
    r.preactivations.push_back(std::move(pre));
    r.pattern.push_back(std::move(segs));
    z = std::move(post);
  }
  r.output = std::move(z);
  return r;
}

void extend_active_params(const Network& net, ActiveParams& params,
                          const std::vector<int>& layer_pattern) {
  const int l = params.depth();  // next layer index, 0-based
  if (l >= net.depth()) throw Error("extend_active_params: past last layer");
  const Layer& layer = net.layers[l];
  if (static_cast<int>(layer_pattern.size()) != layer.out_dim()) {
    throw DimensionMismatch("extend_active_params: pattern size " +
                            std::to_string(layer_pattern.size()) +
                            " for layer with " +
                            std::to_string(layer.out_dim()) + " neurons");
  }
  Eigen::MatrixXd WE = layer.W * params.E.back();
  Eigen::VectorXd WGb = layer.W * params.G.back() + layer.b;
  const PWAActivation& act = layer.activation;
  Eigen::MatrixXd E(layer.out_dim(), WE.cols());
  Eigen::VectorXd G(layer.out_dim());
  for (int i = 0; i < layer.out_dim(); ++i) {
    int seg = layer_pattern[i];
    if (seg < 0 || seg >= act.segments()) {
      throw Error("extend_active_params: segment index out of range");
    }
    E.row(i) = act.slopes(seg) * WE.row(i);
    G(i) = act.slopes(seg) * WGb(i) + act.intercepts(seg);
  }
  params.E.push_back(std::move(E));
  params.G.push_back(std::move(G));
}

ActiveParams active_params_from_pattern(const Network& net,
                                        const ActivationPattern& pattern) {
  if (pattern.size() > net.layers.size()) {
    throw DimensionMismatch("active_params_from_pattern: pattern deeper than net");
  }
  ActiveParams params = ActiveParams::seed(net.n_in());
  for (const std::vector<int>& layer_pattern : pattern) {
    extend_active_params(net, params, layer_pattern);
  }
  return params;
}

ActiveParams active_params_at_point(const Network& net,
                                    const Eigen::VectorXd& x) {
  return active_params_from_pattern(net, forward(net, x).pattern);
}

}  // namespace polyinv
