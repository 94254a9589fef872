#ifndef CWAVE_ANALYSIS_HPP
#define CWAVE_ANALYSIS_HPP

#include "cwave/analytic.hpp"
#include "cwave/core.hpp"
#include "cwave/tdse.hpp"

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace cwave {

struct K1Fit {
  double k1_hat = 0.0;
  double stderr = 0.0;
  std::size_t nodes = 0;
};

// Least-squares slope of sqrt(p_a) against x through the origin, over the
// contiguous run of valid x >= 0 nodes with p_a <= window_max_pa.
K1Fit fit_k1(const RealArray& pa, const Grid& grid, double window_max_pa = 0.01, const MaskArray* valid = nullptr,
             std::size_t min_nodes = 8);

// Speed read off the population build-up: J0 / k1_hat.
double inferred_speed(double k1_hat, double J0);

struct FringeAmplitudes {
  double c_i = 0.0;  // |C_I| = (sqrt(max) + sqrt(min)) / 2
  double c_r = 0.0;  // |C_R| = (sqrt(max) - sqrt(min)) / 2
  double rho_max = 0.0;
  double rho_min = 0.0;
};

// Incident and reflected amplitudes from the standing-wave extrema of
// |psi_m|^2 within `periods` fringe periods (pi / k0) to the left of the step.
FringeAmplitudes fringe_amplitudes(const FieldPair& field, double k0, double periods = 8.0);

enum class DwellVariant { Bohmian, Standard };

std::string to_string(DwellVariant v);

struct DwellTime {
  double tau = 0.0;  // +inf when the net current vanishes (Bohmian variant)
  double stored = 0.0;
  double j_in = 0.0;
  double j_reference = 0.0;  // |C_I|^2 k0 / m
  FringeAmplitudes fringe;
};

struct DwellOptions {
  double fringe_periods = 8.0;
  // |j_in| below this fraction of |C_I|^2 k0 / m counts as zero current.
  double zero_current = 1e-9;
};

// tau = N / j_in with N the stored probability in x >= 0. The Bohmian
// variant takes j_in as the net current just left of the step; the standard
// variant takes the incident-wave current |C_I|^2 k0 / m.
DwellTime dwell_time(const FieldPair& field, const PhysicalParams& params, const EnergySpec& spec,
                     DwellVariant variant, const DwellOptions& opts = {});

// Same on a recorded window: checks the plateau (stored number drift below
// max_drift) and uses the snapshot nearest the window center.
DwellTime dwell_time(std::span<const FieldPair> snapshots, const TimeWindow& window, const PhysicalParams& params,
                     const EnergySpec& spec, DwellVariant variant, const DwellOptions& opts = {},
                     double max_drift = 0.01);

// Carrier wavenumber whose central-difference energy equals E on spacing dx.
double discrete_carrier_wavenumber(double E, double mass, double dx);

// Settings for one quasi-stationary TDSE measurement at fixed energy.
struct PipelineConfig {
  double dx = 2.5e-7;
  double sigma = 4e-4;           // ramp width of the plateau packet
  double plateau_sigmas = 16.0;  // plateau length in units of sigma
  double gap_sigmas = 12.0;      // leading ramp center to step distance
  double margin_sigmas = 10.0;   // clearance between packet tails and walls
  double dt = 0.0;               // 0 picks default_time_step
  std::size_t window_steps = 10;
  double window_max_pa = 0.01;
  double guard_ratio = 1.0;
  bool discrete_carrier = true;
  double max_drift = 0.01;
  bool energy_frame = true;      // propagate relative to E (see EvolveConfig::energy_reference)
};

struct PipelineResult {
  EnergySpec spec;
  Wavenumbers approx;
  Wavenumbers exact;
  Grid grid;
  FieldPair center;  // snapshot nearest the middle of the window
  QuasiStationaryPa pa;
  K1Fit fit;
  double v_hat = 0.0;
  double speed = 0.0;  // sqrt(2 |delta| / m)
  DwellTime dwell_bohmian;
  DwellTime dwell_standard;
  std::size_t steps = 0;
  double norm_drift = 0.0;
};

// Plateau packet scattering run up to the quasi-stationary phase, followed by
// the p_a fit, the speed inference and both dwell times. Observers see every
// step of the run.
PipelineResult run_pipeline(const PhysicalParams& params, const EnergySpec& spec, const PipelineConfig& config = {},
                            const std::vector<SnapshotObserver>& observers = {});

struct SweepRow {
  double delta = 0.0;
  Regime regime = Regime::Allowed;
  double k1 = std::numeric_limits<double>::quiet_NaN();
  double k1_exact = std::numeric_limits<double>::quiet_NaN();
  double k1_hat = std::numeric_limits<double>::quiet_NaN();
  double k1_stderr = std::numeric_limits<double>::quiet_NaN();
  double speed = std::numeric_limits<double>::quiet_NaN();
  double speed_exact = std::numeric_limits<double>::quiet_NaN();
  double v_hat = std::numeric_limits<double>::quiet_NaN();
  double tau_bohmian = std::numeric_limits<double>::quiet_NaN();
  double tau_standard = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
  std::string error;
};

// One row per detuning; failures are recorded in the row and the sweep goes on.
std::vector<SweepRow> sweep(const PhysicalParams& params, std::span<const double> deltas,
                            const PipelineConfig& config = {}, std::size_t workers = 1);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace cwave

#endif  // CWAVE_ANALYSIS_HPP
