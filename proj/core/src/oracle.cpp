#include "polyinv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "polyinv/errors.hpp"
#include "polyinv/parallel.hpp"

namespace polyinv {

namespace {

constexpr double kDegenerateNormalTol = 1e-12;
constexpr int kScaleGuardLimit = 24;

struct Partial {
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
  ActivationPattern pattern;
  ActiveParams params;
  std::vector<int> layer_segs;  // scratch for the current layer
};

bool prefix_alive(const Partial& p, const Tolerances& tol) {
  try {
    auto [center, radius] = chebyshev_center(HPolytope(p.C, p.d), tol);
    (void)center;
    return radius >= tol.radius;
  } catch (const EmptyPolytope&) {
    return false;
  }
}

Eigen::MatrixXd append_row(const Eigen::MatrixXd& C, const Eigen::VectorXd& a) {
  Eigen::MatrixXd out(C.rows() + 1, C.cols());
  out.topRows(C.rows()) = C;
  out.row(C.rows()) = a.transpose();
  return out;
}

Eigen::VectorXd append_entry(const Eigen::VectorXd& d, double b) {
  Eigen::VectorXd out(d.size() + 1);
  out.head(d.size()) = d;
  out(d.size()) = b;
  return out;
}

// Plain layer-by-layer evaluation without bookkeeping, for the integrator
// hot loop.
Eigen::VectorXd eval_net(const Network& net, const Eigen::VectorXd& x) {
  Eigen::VectorXd z = x;
  for (const Layer& layer : net.layers) {
    Eigen::VectorXd pre = layer.W * z + layer.b;
    for (int i = 0; i < pre.size(); ++i) {
      pre(i) = layer.activation.value(pre(i));
    }
    z = std::move(pre);
  }
  return z;
}

// Signed distance outside S: positive once any face is crossed.
double exit_depth(const HPolytope& S, const Eigen::VectorXd& x, int* face) {
  double worst = -1e300;
  for (int i = 0; i < S.rows(); ++i) {
    double norm = S.C.row(i).norm();
    if (norm < 1e-13) continue;
    double g = (S.C.row(i).dot(x) - S.d(i)) / norm;
    if (g > worst) {
      worst = g;
      if (face) *face = i;
    }
  }
  return worst;
}

// Penetration depth into the obstacle interior: positive strictly inside.
double entry_depth(const HPolytope& O, const Eigen::VectorXd& x) {
  double depth = 1e300;
  for (int i = 0; i < O.rows(); ++i) {
    double norm = O.C.row(i).norm();
    if (norm < 1e-13) continue;
    depth = std::min(depth, (O.d(i) - O.C.row(i).dot(x)) / norm);
  }
  return depth;
}

}  // namespace

std::vector<LinearRegion> enumerate_regions_bruteforce(const Network& net,
                                                       const HPolytope& S,
                                                       const Tolerances& tol) {
  net.validate();
  if (net.breakpoint_count() > kScaleGuardLimit) {
    throw ScaleGuard("enumerate_regions_bruteforce: " +
                     std::to_string(net.breakpoint_count()) +
                     " breakpoint hyperplanes exceed the oracle limit of " +
                     std::to_string(kScaleGuardLimit));
  }

  std::vector<Partial> alive;
  {
    Partial root;
    root.C = S.C;
    root.d = S.d;
    root.params = ActiveParams::seed(net.n_in());
    alive.push_back(std::move(root));
  }

  for (int l = 0; l < net.depth(); ++l) {
    const Layer& layer = net.layers[l];
    const PWAActivation& act = layer.activation;
    const int K = act.segments();

    std::vector<Partial> done;
    for (Partial& start : alive) {
      start.layer_segs.clear();
      // Depth-first over this layer's neurons, pruning dead prefixes.
      std::vector<Partial> stack;
      stack.push_back(std::move(start));
      while (!stack.empty()) {
        Partial cur = std::move(stack.back());
        stack.pop_back();
        int neuron = static_cast<int>(cur.layer_segs.size());
        if (neuron == layer.out_dim()) {
          done.push_back(std::move(cur));
          continue;
        }
        Eigen::VectorXd normal =
            (layer.W.row(neuron) * cur.params.E.back()).transpose();
        double shift =
            layer.W.row(neuron).dot(cur.params.G.back()) + layer.b(neuron);
        bool degenerate =
            normal.lpNorm<Eigen::Infinity>() < kDegenerateNormalTol;

        // Push in reverse so segments are explored in increasing order.
        for (int seg = K - 1; seg >= 0; --seg) {
          if (degenerate) {
            if (act.segment_of(shift) != seg) continue;
            Partial next = cur;
            next.layer_segs.push_back(seg);
            stack.push_back(std::move(next));
            continue;
          }
          Partial next = cur;
          if (seg < K - 1) {
            next.C = append_row(next.C, normal);
            next.d = append_entry(next.d, act.breakpoints(seg) - shift);
          }
          if (seg > 0) {
            next.C = append_row(next.C, -normal);
            next.d = append_entry(next.d, shift - act.breakpoints(seg - 1));
          }
          if (!prefix_alive(next, tol)) continue;
          next.layer_segs.push_back(seg);
          stack.push_back(std::move(next));
        }
      }
    }

    alive.clear();
    for (Partial& p : done) {
      p.pattern.push_back(p.layer_segs);
      extend_active_params(net, p.params, p.layer_segs);
      p.layer_segs.clear();
      alive.push_back(std::move(p));
    }
  }

  std::vector<LinearRegion> out;
  out.reserve(alive.size());
  int id = 0;
  for (Partial& p : alive) {
    LinearRegion region;
    region.polytope = HPolytope(std::move(p.C), std::move(p.d));
    region.pattern = std::move(p.pattern);
    region.params = std::move(p.params);
    region.depth = net.depth();
    region.id = id++;
    out.push_back(std::move(region));
  }
  return out;
}

Trajectory simulate(const LinearSystem& sys, const Network& net,
                    const Eigen::VectorXd& x0, double horizon, double step,
                    const HPolytope& S, const std::vector<HPolytope>& obstacles,
                    const SimulateOptions& sim_opts) {
  sys.validate();
  if (step <= 0 || horizon < step) {
    throw Error("simulate: need step > 0 and horizon >= step");
  }
  if (x0.size() != sys.state_dim()) {
    throw DimensionMismatch("simulate: x0 has " + std::to_string(x0.size()) +
                            " entries for an " +
                            std::to_string(sys.state_dim()) + "-state system");
  }

  auto field = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return sys.A * x + sys.B * eval_net(net, x);
  };

  Trajectory traj;
  const long n_steps = static_cast<long>(std::ceil(horizon / step - 1e-12));
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  int face_prev = -1;
  double exit_prev = exit_depth(S, x0, &face_prev);
  std::vector<double> entry_prev(obstacles.size());
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    entry_prev[k] = entry_depth(obstacles[k], x0);
  }

  Eigen::VectorXd x = x0;
  double t = 0.0;
  for (long i = 0; i < n_steps; ++i) {
    double h = std::min(step, horizon - t);
    Eigen::VectorXd k1 = field(x);
    Eigen::VectorXd k2 = field(x + 0.5 * h * k1);
    Eigen::VectorXd k3 = field(x + 0.5 * h * k2);
    Eigen::VectorXd k4 = field(x + h * k3);
    Eigen::VectorXd x_next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    double t_next = t + h;

    if (x_next.lpNorm<Eigen::Infinity>() > 1e12 || !x_next.allFinite()) {
      throw NonFinite("simulate: state diverged at t=" + std::to_string(t_next));
    }

    int face = -1;
    double ed = exit_depth(S, x_next, &face);
    if (ed > sim_opts.event_tol) {
      double g0 = exit_prev, g1 = ed;
      double frac = g1 > g0 ? std::clamp((0.0 - g0) / (g1 - g0), 0.0, 1.0) : 1.0;
      traj.exit_event.kind = ExitKind::LeftSafeSet;
      traj.exit_event.time = t + frac * h;
      traj.exit_event.face_row = face;
      traj.times.push_back(traj.exit_event.time);
      traj.states.push_back(x + frac * (x_next - x));
      return traj;
    }
    for (std::size_t k = 0; k < obstacles.size(); ++k) {
      double pen = entry_depth(obstacles[k], x_next);
      if (pen > sim_opts.event_tol) {
        double g0 = -entry_prev[k], g1 = -pen;  // signed "outside" measure
        double frac = g0 > g1 ? std::clamp(g0 / (g0 - g1), 0.0, 1.0) : 1.0;
        traj.exit_event.kind = ExitKind::EnteredObstacle;
        traj.exit_event.time = t + frac * h;
        traj.exit_event.obstacle = static_cast<int>(k);
        traj.times.push_back(traj.exit_event.time);
        traj.states.push_back(x + frac * (x_next - x));
        return traj;
      }
      entry_prev[k] = pen;
    }
    exit_prev = ed;

    x = std::move(x_next);
    t = t_next;
    traj.times.push_back(t);
    traj.states.push_back(x);
  }
  return traj;
}

std::optional<Trajectory> falsify(const LinearSystem& sys, const Network& net,
                                  const HPolytope& S,
                                  const std::vector<HPolytope>& obstacles,
                                  const FalsifyOptions& opts) {
  std::vector<Eigen::VectorXd> starts;

  // Boundary-piece vertices first: they are the checkpoints of the vertex
  // condition and the most likely escape witnesses.
  {
    SegmentOptions seg_opts;
    seg_opts.prune = true;
    seg_opts.threads = opts.threads;
    seg_opts.tol = opts.tol;
    std::vector<LinearRegion> regions = segment(net, S, obstacles, seg_opts);
    VerifyOptions piece_opts;
    piece_opts.tol = opts.tol;
    piece_opts.probe_seed = opts.seed;
    for (const BoundaryPiece& piece :
         boundary_pieces(S, obstacles, regions, piece_opts)) {
      for (const Eigen::VectorXd& v : piece.verts) starts.push_back(v);
    }
  }

  // Random points on every face of S and of the obstacle closures.
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<Eigen::VectorXd>> face_verts;
  {
    HPolytope S_min = remove_redundant(S, opts.tol);
    for (const Face& f : faces(S_min)) {
      auto fv = vertices(f.geometry, opts.tol).vertices;
      if (!fv.empty()) face_verts.push_back(std::move(fv));
    }
    for (const HPolytope& o : obstacles) {
      HPolytope o_min = remove_redundant(o, opts.tol);
      for (const Face& f : faces(o_min)) {
        auto fv = vertices(f.geometry, opts.tol).vertices;
        if (!fv.empty()) face_verts.push_back(std::move(fv));
      }
    }
  }
  if (!face_verts.empty()) {
    for (int s = 0; s < opts.n_samples; ++s) {
      const auto& fv = face_verts[s % face_verts.size()];
      Eigen::VectorXd w(fv.size());
      for (int i = 0; i < w.size(); ++i) w(i) = unit(rng);
      double total = w.sum();
      if (total <= 0) continue;
      w /= total;
      Eigen::VectorXd p = Eigen::VectorXd::Zero(S.dim());
      for (std::size_t k = 0; k < fv.size(); ++k) p += w(k) * fv[k];
      starts.push_back(std::move(p));
    }
  }

  SimulateOptions sim_opts;
  sim_opts.event_tol = opts.event_tol;

  // Chunked parallel sweep; the lowest sample index wins.
  const std::size_t chunk =
      std::max<std::size_t>(16, 4 * resolve_thread_count(opts.threads));
  for (std::size_t begin = 0; begin < starts.size(); begin += chunk) {
    std::size_t end = std::min(begin + chunk, starts.size());
    std::vector<std::optional<Trajectory>> results(end - begin);
    parallel_for(end - begin, opts.threads, [&](std::size_t i) {
      Trajectory t = simulate(sys, net, starts[begin + i], opts.horizon,
                              opts.step, S, obstacles, sim_opts);
      if (t.exit_event.kind != ExitKind::None) results[i] = std::move(t);
    });
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (results[i]) return results[i];
    }
  }
  return std::nullopt;
}

}  // namespace polyinv
