#pragma once

// Final energies from the initial Fock-state Wigner function carried along
// real classical trajectories (exact for quadratic Hamiltonians).

#include <array>
#include <vector>

#include "oscswap/invariants.hpp"
#include "oscswap/protocol.hpp"

namespace oscswap {

inline constexpr int kDefaultMeshNodes = 16;

struct QuadratureAxis {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum_i weights[i] g(nodes[i]) ~ integral of g
};

/// Tensor-product phase-space mesh over (x, px, y, py).
struct PhaseSpaceMesh {
  std::array<QuadratureAxis, 4> axes;

  /// Gauss-Hermite nodes in the scaled variables sqrt(w) x and p / sqrt(w) of
  /// each initial oscillator, `nodes` per axis.
  static PhaseSpaceMesh gauss_hermite(double w1, double w2, int nodes = kDefaultMeshNodes);

  std::size_t size() const;
};

/// Nodes per axis that integrate the energy of |n, k> exactly on a
/// Gauss-Hermite mesh, never below kDefaultMeshNodes.
int mesh_nodes_for(const FockLabel& label);

/// Sum of quadrature weight times initial Wigner value; 1 for a mesh that
/// covers the state.
double wigner_mass(const FockLabel& label, double w1, double w2, const PhaseSpaceMesh& mesh);

/// <H(T)> for initial |n, k> in the trap diag(w1^2, w2^2), propagated through
/// `drive` and evaluated with the trap `final_M`. Throws MeshCoverage when the
/// quadrature mass misses 1 by more than 1e-4.
double wigner_final_energy(const FockLabel& label, double w1, double w2,
                           const PotentialSchedule& drive, const SymMat2& final_M,
                           const PhaseSpaceMesh& mesh, int steps = kDefaultTrajectorySteps);

double wigner_final_energy(const FockLabel& label, const ProtocolSpec& spec,
                           const PhaseSpaceMesh& mesh, int steps = kDefaultTrajectorySteps);

/// Uses a default mesh sized by mesh_nodes_for.
double wigner_final_energy(const FockLabel& label, const ProtocolSpec& spec,
                           int steps = kDefaultTrajectorySteps);

}  // namespace oscswap
