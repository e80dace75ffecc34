#include "oscswap/wigner.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "oscswap/error.hpp"
#include "oscswap/kernels.hpp"
#include "oscswap/oscillator.hpp"
#include "oscswap/parallel.hpp"

namespace oscswap {

namespace {

constexpr std::size_t kChunk = 1024;

// Golub-Welsch: nodes and weights for weight function exp(-s^2).
QuadratureAxis hermite_rule(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = std::sqrt(0.5 * i);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadratureAxis rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double mu0 = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    const double v = es.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    rule.weights[static_cast<std::size_t>(i)] = mu0 * v * v;
  }
  return rule;
}

// Physical nodes x = s * scale with weights absorbing exp(s^2) and the Jacobian.
QuadratureAxis scaled(const QuadratureAxis& rule, double scale) {
  QuadratureAxis axis;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = rule.nodes[i];
    axis.nodes.push_back(s * scale);
    axis.weights.push_back(rule.weights[i] * std::exp(s * s) * scale);
  }
  return axis;
}

struct FlatMesh {
  std::vector<double> x, y, px, py, weight;
};

FlatMesh flatten(const FockLabel& label, double w1, double w2, const PhaseSpaceMesh& mesh) {
  const auto& [ax, apx, ay, apy] = mesh.axes;
  std::vector<double> wx(ax.nodes.size() * apx.nodes.size());
  for (std::size_t a = 0; a < ax.nodes.size(); ++a)
    for (std::size_t b = 0; b < apx.nodes.size(); ++b)
      wx[a * apx.nodes.size() + b] = ax.weights[a] * apx.weights[b] *
                                     wigner_fock(label.n, w1, ax.nodes[a], apx.nodes[b]);
  std::vector<double> wy(ay.nodes.size() * apy.nodes.size());
  for (std::size_t c = 0; c < ay.nodes.size(); ++c)
    for (std::size_t d = 0; d < apy.nodes.size(); ++d)
      wy[c * apy.nodes.size() + d] = ay.weights[c] * apy.weights[d] *
                                     wigner_fock(label.k, w2, ay.nodes[c], apy.nodes[d]);

  FlatMesh flat;
  const std::size_t total = wx.size() * wy.size();
  flat.x.reserve(total);
  flat.px.reserve(total);
  flat.y.reserve(total);
  flat.py.reserve(total);
  flat.weight.reserve(total);
  for (std::size_t a = 0; a < ax.nodes.size(); ++a)
    for (std::size_t b = 0; b < apx.nodes.size(); ++b)
      for (std::size_t c = 0; c < ay.nodes.size(); ++c)
        for (std::size_t d = 0; d < apy.nodes.size(); ++d) {
          flat.x.push_back(ax.nodes[a]);
          flat.px.push_back(apx.nodes[b]);
          flat.y.push_back(ay.nodes[c]);
          flat.py.push_back(apy.nodes[d]);
          flat.weight.push_back(wx[a * apx.nodes.size() + b] * wy[c * apy.nodes.size() + d]);
        }
  return flat;
}

}  // namespace

PhaseSpaceMesh PhaseSpaceMesh::gauss_hermite(double w1, double w2, int nodes) {
  if (!(w1 > 0.0) || !(w2 > 0.0)) throw InvalidInput("mesh frequencies must be positive");
  if (nodes < 2) throw InvalidInput("mesh needs at least two nodes per axis");
  const QuadratureAxis rule = hermite_rule(nodes);
  PhaseSpaceMesh mesh;
  mesh.axes[0] = scaled(rule, 1.0 / std::sqrt(w1));
  mesh.axes[1] = scaled(rule, std::sqrt(w1));
  mesh.axes[2] = scaled(rule, 1.0 / std::sqrt(w2));
  mesh.axes[3] = scaled(rule, std::sqrt(w2));
  return mesh;
}

std::size_t PhaseSpaceMesh::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.nodes.size();
  return n;
}

int mesh_nodes_for(const FockLabel& label) {
  return std::max(kDefaultMeshNodes, std::max(label.n, label.k) + 2);
}

double wigner_mass(const FockLabel& label, double w1, double w2, const PhaseSpaceMesh& mesh) {
  auto plane = [](int n, double w, const QuadratureAxis& q, const QuadratureAxis& p) {
    double s = 0.0;
    for (std::size_t a = 0; a < q.nodes.size(); ++a)
      for (std::size_t b = 0; b < p.nodes.size(); ++b)
        s += q.weights[a] * p.weights[b] * wigner_fock(n, w, q.nodes[a], p.nodes[b]);
    return s;
  };
  return plane(label.n, w1, mesh.axes[0], mesh.axes[1]) *
         plane(label.k, w2, mesh.axes[2], mesh.axes[3]);
}

double wigner_final_energy(const FockLabel& label, double w1, double w2,
                           const PotentialSchedule& drive, const SymMat2& final_M,
                           const PhaseSpaceMesh& mesh, int steps) {
  if (label.n < 0 || label.k < 0) throw InvalidInput("quantum numbers must be non-negative");
  if (steps < 1) throw InvalidInput("need at least one integration step");
  const double mass = wigner_mass(label, w1, w2, mesh);
  if (!(std::abs(mass - 1.0) <= 1e-4)) {
    std::ostringstream os;
    os << "phase-space mesh misses Wigner mass " << std::abs(mass - 1.0);
    throw MeshCoverage(os.str(), std::abs(mass - 1.0));
  }

  FlatMesh flat = flatten(label, w1, w2, mesh);
  const std::vector<SymMat2> m = drive.half_step_nodes(steps);
  const double h = drive.duration() / steps;
  const auto& kernels = simd::active_kernels();

  const std::size_t total = flat.weight.size();
  const std::size_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t n = std::min(kChunk, total - lo);
    double* x = flat.x.data() + lo;
    double* y = flat.y.data() + lo;
    double* px = flat.px.data() + lo;
    double* py = flat.py.data() + lo;
    for (int s = 0; s < steps; ++s) {
      const auto k = static_cast<std::size_t>(2 * s);
      kernels.rk4_batch(x, y, px, py, n, m[k], m[k + 1], m[k + 2], h);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = 0.5 * (px[i] * px[i] + py[i] * py[i]) +
                       0.5 * (final_M.a11 * x[i] * x[i] + 2.0 * final_M.a12 * x[i] * y[i] +
                              final_M.a22 * y[i] * y[i]);
      acc += flat.weight[lo + i] * e;
    }
    partial[c] = acc;
  });
  double energy = 0.0;
  for (double p : partial) energy += p;
  return energy / mass;
}

double wigner_final_energy(const FockLabel& label, const ProtocolSpec& spec,
                           const PhaseSpaceMesh& mesh, int steps) {
  return wigner_final_energy(label, spec.w1, spec.w2, PotentialSchedule::designed(spec),
                             spec.final_potential(), mesh, steps);
}

double wigner_final_energy(const FockLabel& label, const ProtocolSpec& spec, int steps) {
  const PhaseSpaceMesh mesh =
      PhaseSpaceMesh::gauss_hermite(spec.w1, spec.w2, mesh_nodes_for(label));
  return wigner_final_energy(label, spec, mesh, steps);
}

}  // namespace oscswap
