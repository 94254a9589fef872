#ifndef CWAVE_BOHMIAN_HPP
#define CWAVE_BOHMIAN_HPP

#include "cwave/core.hpp"
#include "cwave/tdse.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace cwave {

// Pilot-wave guidance for the two-sector configuration space: a velocity
// field per guide and the jump rates between guides.
//
//   v_s     = Im(psi_s^* d_x psi_s) / (m |psi_s|^2)
//   sigma_m = [-2 V_i Im(psi_m^* psi_a)]^+ / |psi_m|^2
//   sigma_a = [+2 V_i Im(psi_m^* psi_a)]^+ / |psi_a|^2
//
// Nodes whose sector density is below density_floor are unoccupied; their
// velocity and rate are zero.
struct GuidanceField {
  Grid grid;
  double t = 0.0;
  RealArray v_m;
  RealArray v_a;
  RealArray sigma_m;
  RealArray sigma_a;
  MaskArray occupied_m;
  MaskArray occupied_a;
  double density_floor = 0.0;

  const RealArray& velocity(Sector s) const { return s == Sector::Main ? v_m : v_a; }
  const RealArray& rate(Sector s) const { return s == Sector::Main ? sigma_m : sigma_a; }
  const MaskArray& occupied(Sector s) const { return s == Sector::Main ? occupied_m : occupied_a; }
};

// floor_fraction scales the maximum total density to give the floor.
GuidanceField guidance(const FieldPair& field, const PotentialProfile& potential, double mass,
                       double floor_fraction = 1e-12);

struct Particle {
  std::uint64_t id = 0;
  Sector sector = Sector::Main;
  double x = 0.0;
  bool alive = true;
};

struct EnsembleDiagnostics {
  std::size_t jumps = 0;
  std::size_t masked_entries = 0;  // moved onto nodes below the density floor
  std::size_t wall_crossings = 0;  // aux particle pushed into x < 0 (reflected back)
  std::size_t left_domain = 0;
};

struct Ensemble {
  std::vector<Particle> particles;
  std::uint64_t seed = 0;
  EnsembleDiagnostics diagnostics;

  std::size_t alive_count() const;
  std::size_t count_in(Sector s) const;
};

// Quantum-equilibrium sample: picks a (sector, node) pair by inverse CDF over
// the concatenated weights |psi_m|^2 then |psi_a|^2 (nodes below the floor
// get zero weight), then jitters uniformly within the node cell.
Ensemble sample_ensemble(const FieldPair& field, std::size_t count, std::uint64_t seed,
                         double floor_fraction = 1e-12);

struct AdvanceOptions {
  double velocity_scale = 1.0;  // != 1 only for negative controls
  std::size_t workers = 1;
  // Largest drift per sub-step in grid cells; 0 takes the whole step at once.
  double max_cells = 1.0;
  std::size_t max_substeps = 64;
};

// One step of the jump-or-drift process between two guidance snapshots.
// The step is cut into sub-steps h so that |v| h stays within max_cells grid
// cells. In each sub-step a particle jumps with probability 1 - exp(-sigma h)
// (sigma at the sub-step midpoint, same x, other sector); otherwise it drifts
// by the midpoint rule. v and sigma are interpolated linearly in x and t.
// A step that needs no cutting is a single midpoint step. step_index selects
// the random counters so that histories are reproducible.
void advance(Ensemble& ensemble, const GuidanceField& at_t, const GuidanceField& at_t_dt, double dt,
             std::uint64_t step_index, const AdvanceOptions& opts = {});

struct ContinuityResidual {
  RealArray res_m;
  RealArray res_a;
  RealArray scale_m;  // magnitude of the largest term at each node
  RealArray scale_a;
};

// Residual of the two-sector continuity equations with rho = |psi|^2,
//   d_t rho_m + d_x(rho_m v_m) - (sigma_a rho_a - sigma_m rho_m),
// using one implicit-midpoint step of length dt_probe for d_t and the
// average of the spatial and source terms at both ends of the step. End
// nodes are set to zero.
ContinuityResidual continuity_residual(const FieldPair& field, const PotentialProfile& potential, double mass,
                                       double dt_probe);

// Total-variation distance between the sector-resolved particle histogram and
// the Born weights, using `bins` equal bins across the grid per sector.
double histogram_distance(const Ensemble& ensemble, const FieldPair& field, std::size_t bins = 100);

struct TrajectorySample {
  double t = 0.0;
  std::uint64_t id = 0;
  Sector sector = Sector::Main;
  double x = 0.0;
};

struct ParticleDwell {
  std::uint64_t id = 0;
  bool entered = false;
  bool inside_at_end = false;
  std::size_t entries = 0;
  double first_entry = 0.0;
  double last_exit = 0.0;
  double residence = 0.0;  // total time spent in x >= 0
};

struct DwellStatistics {
  std::vector<ParticleDwell> particles;
  double fraction_never_entered = 0.0;
  double fraction_trapped = 0.0;  // inside x >= 0 at the end of the record
  double fraction_entered = 0.0;
  double mean_residence = 0.0;    // over particles that entered
};

// Online bookkeeping of x = 0 crossings.
class DwellTracker {
 public:
  DwellTracker() = default;
  explicit DwellTracker(const Ensemble& ensemble, double t0);

  void observe(std::uint64_t id, double x, double t);
  void observe(const Ensemble& ensemble, double t);
  DwellStatistics finish() const;

 private:
  struct State {
    ParticleDwell dwell;
    bool inside = false;
    double since = 0.0;
    bool seen = false;
  };
  State& state_for(std::uint64_t id);

  std::vector<State> states_;
  double t_last_ = 0.0;
};

// Residence statistics from a recorded trajectory log (any order).
DwellStatistics dwell_statistics(std::span<const TrajectorySample> trajectories);

struct BohmianRunConfig {
  EvolveConfig evolve;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::size_t cadence = 10;  // steps between histogram checks
  std::size_t bins = 100;
  double floor_fraction = 1e-12;
  AdvanceOptions advance;
  std::size_t trajectory_stride = 0;   // 0 disables the trajectory log
  std::size_t trajectory_particles = 0;  // how many ids to log (0 = all)
};

struct DistanceSample {
  std::size_t step = 0;
  double t = 0.0;
  double distance = 0.0;
};

struct BohmianRunResult {
  EvolveResult tdse;
  Ensemble ensemble;
  std::vector<DistanceSample> distances;
  std::vector<TrajectorySample> trajectories;
  DwellStatistics dwell;
};

// Evolves the wavefunction and an equilibrium ensemble together. The ensemble
// is sampled from `initial` unless one is supplied.
BohmianRunResult run_bohmian(const FieldPair& initial, const PotentialProfile& potential, double mass,
                             const BohmianRunConfig& config, const Ensemble* ensemble = nullptr,
                             const std::vector<SnapshotObserver>& observers = {});

// Histogram distance series of an ensemble transported through a TDSE run.
std::vector<DistanceSample> equivariance_check(const FieldPair& initial, const PotentialProfile& potential,
                                               double mass, const Ensemble& ensemble,
                                               const BohmianRunConfig& config);

}  // namespace cwave

#endif  // CWAVE_BOHMIAN_HPP
