#ifndef CWAVE_TDSE_HPP
#define CWAVE_TDSE_HPP

#include "cwave/block_tridiagonal.hpp"
#include "cwave/core.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cwave {

// Incident packet in the main guide, moving right toward the step.
//
// With plateau == 0 the envelope is the Gaussian exp(-(x-x0)^2 / (4 sigma^2)).
// With plateau > 0 the envelope is a box of that length smoothed by the same
// Gaussian kernel (an erf flat-top), which gives a long quasi-stationary phase
// at the step while keeping the spectrum Gaussian-bounded.
struct PacketSpec {
  double x0 = 0.0;
  double sigma = 0.0;
  double k = 0.0;
  double plateau = 0.0;
  double min_sigma_k = 20.0;
};

FieldPair gaussian_packet(const Grid& grid, const PacketSpec& spec);
FieldPair plateau_packet(const Grid& grid, const PacketSpec& spec);
// Dispatches on spec.plateau.
FieldPair wave_packet(const Grid& grid, const PacketSpec& spec);

// Largest wavenumber carrying appreciable weight in the packet spectrum.
double packet_max_wavenumber(const PacketSpec& spec);

// Default step size 0.2 / max(|V|, k_max^2 / 2m).
double default_time_step(const PotentialProfile& potential, double mass, const PacketSpec& spec);

// Implicit-midpoint propagator for the coupled pair,
//   (1 + i dt/2 H) psi(t+dt) = (1 - i dt/2 H) psi(t),
// with H the two-component Hamiltonian discretized by second-order central
// differences. The block-tridiagonal matrix is factored once; each step is a
// single forward/back substitution. Both components are held at zero on the
// two edge nodes and psi_a on the wall mask.
class CrankNicolson {
 public:
  CrankNicolson(const PotentialProfile& potential, double mass, double dt);

  void advance(FieldPair& field) const;

  double dt() const { return dt_; }
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  double dt_;
  MaskArray clamp_m_;
  MaskArray clamp_a_;
  BlockTridiagonalLU<Complex> lu_;
};

// One step without keeping the factorization around.
FieldPair step(const FieldPair& field, const PotentialProfile& potential, double mass, double dt);

struct EvolveConfig {
  double dt = 0.0;
  double t_end = 0.0;
  std::size_t snapshot_stride = 1;
  // Abort when the density within `edge_width` nodes of either wall exceeds
  // this fraction of the total norm. edge_width == 0 picks 1% of the grid.
  double edge_tolerance = 1e-6;
  std::size_t edge_width = 0;
  // Propagate with H - energy_reference. Densities, currents and rates are
  // unchanged; the phase error of the scheme now grows with |E - energy_reference|
  // instead of |E|. Observers and the result still see the lab-frame phase.
  double energy_reference = 0.0;
};

using SnapshotObserver = std::function<void(const FieldPair&, std::size_t step)>;

struct EvolveResult {
  FieldPair final_state;
  std::size_t steps = 0;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  std::vector<std::string> warnings;
};

// Repeated implicit-midpoint steps. Observers see the initial state, every
// snapshot_stride-th step and the final step. Throws RunError if density
// reaches the domain edges.
EvolveResult evolve(FieldPair field, const PotentialProfile& potential, double mass,
                    const EvolveConfig& config, const std::vector<SnapshotObserver>& observers = {});

// Fraction of the norm sitting within `width` nodes of either domain edge.
double edge_density_fraction(const FieldPair& field, std::size_t width);

// j = (1/m) Im(psi^* d psi/dx), central differences in the interior and
// one-sided differences on the two end nodes.
template <typename Derived>
RealArray probability_current(const Eigen::ArrayBase<Derived>& psi, double dx, double mass) {
  const Eigen::Index n = psi.size();
  RealArray j(n);
  if (n < 2) {
    j.setZero();
    return j;
  }
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    j(i) = std::imag(std::conj(psi(i)) * (psi(i + 1) - psi(i - 1))) / (2.0 * dx * mass);
  }
  j(0) = std::imag(std::conj(psi(0)) * (psi(1) - psi(0))) / (dx * mass);
  j(n - 1) = std::imag(std::conj(psi(n - 1)) * (psi(n - 1) - psi(n - 2))) / (dx * mass);
  return j;
}

RealArray probability_current(const FieldPair& field, Sector sector, double mass);

// Probability stored in the step region: sum over x >= 0 of the density times dx.
double stored_number(const FieldPair& field);

// Probability in x < 0 (the reflected share once the packet has left the step).
double left_norm(const FieldPair& field);

struct TimeWindow {
  double t_begin = 0.0;
  double t_end = 0.0;
};

struct QuasiStationaryPa {
  RealArray pa;
  MaskArray valid;
  std::size_t snapshots_used = 0;
  double stored_drift = 0.0;  // (max - min) / mean of stored_number over the window
};

// Time-averaged p_a over the snapshots inside the window. Nodes whose
// time-averaged density is below density_floor times its maximum are masked.
// Throws RunError when stored_number drifts by max_drift or more across the
// window (no plateau). A zero-length window uses the snapshot nearest t_begin.
QuasiStationaryPa quasi_stationary_pa(std::span<const FieldPair> snapshots, const TimeWindow& window,
                                      double max_drift = 0.01, double density_floor = 1e-12);

}  // namespace cwave

#endif  // CWAVE_TDSE_HPP
