#ifndef CWAVE_CLI_HPP
#define CWAVE_CLI_HPP

#include "cwave/analysis.hpp"
#include "cwave/analytic.hpp"
#include "cwave/bohmian.hpp"
#include "cwave/core.hpp"
#include "cwave/tdse.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cwave::cli {

// Flat `key = value` text. Blank lines and lines starting with '#' are
// skipped; a trailing '# ...' on a value line is a comment.
class KeyValues {
 public:
  static KeyValues parse(std::istream& in, const std::string& origin = "config");
  static KeyValues load(const std::filesystem::path& path);

  // Parses one `key=value` override.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Every tunable the commands read. Units: m in s/m^2, energies and rates in
// 1/s, lengths in m, times in s. Unset optionals are derived from the rest.
struct Settings {
  PhysicalParams params;
  std::optional<double> delta = -100e9;  // detuning E - V0 + J0
  std::optional<double> energy;          // overrides delta when set
  bool exact = false;                    // exact quartic dispersion
  double guard_ratio = 2.0;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  // two-state
  std::optional<double> t_max;  // pi / (2 J0)
  std::size_t steps = 100;

  // stationary grid
  double x_min = -1e-4;
  double x_max = 2e-4;
  double dx = 1e-7;
  double amplitude = 1.0;
  double floor_fraction = 1e-12;

  // wave packet and time evolution
  double sigma = 3e-4;
  std::optional<double> x0;     // -10 sigma - plateau / 2
  double plateau = 0.0;
  std::optional<double> k;      // carrier wavenumber; discrete-dispersion value by default
  double min_sigma_k = 20.0;
  double evolve_dx = 2.5e-7;
  std::optional<double> evolve_x_min;
  std::optional<double> evolve_x_max;
  double dt = 0.0;              // 0: 0.2 / max(|V|, k_max^2 / 2m)
  std::optional<double> t_end;  // time for the packet center to return to x0
  std::size_t stride = 100;
  double edge_tolerance = 1e-6;
  std::optional<double> energy_reference;  // E

  // Bohmian ensemble
  std::size_t count = 1000;
  std::size_t cadence = 10;
  std::size_t bins = 100;
  double velocity_scale = 1.0;
  double max_cells = 1.0;
  std::size_t trajectory_stride = 10;
  std::size_t trajectory_particles = 100;

  // dwell times
  std::string dwell_source = "analytic";  // analytic | tdse
  double fringe_periods = 8.0;
  double zero_current = 1e-9;

  PipelineConfig pipeline;
  std::vector<double> deltas{-200e9, -100e9, -50e9, 50e9, 100e9, 200e9};

  EnergySpec energy_spec() const;
  WavenumberOptions wavenumber_options() const { return {exact, guard_ratio}; }
};

// Unknown keys and unparsable values raise InputError.
Settings settings_from(const KeyValues& kv);

// Writes every key with its default value.
void write_defaults(std::ostream& out);

// Packet scattering set up from the evolve/packet keys.
struct Scattering {
  PhysicalParams params;
  EnergySpec spec;
  PacketSpec packet;
  Grid grid;
  PotentialProfile potential;
  FieldPair initial;
  EvolveConfig evolve;
};

Scattering make_scattering(const Settings& s);

// x, Re/Im psi_m, Re/Im psi_a, p_a, guidance fields.
void write_state(std::ostream& out, const FieldPair& field, const GuidanceField* guide = nullptr);

// Each command writes its CSV files into `out` and returns the exit code.
int cmd_two_state(const Settings& s, const std::filesystem::path& out);
int cmd_stationary(const Settings& s, const std::filesystem::path& out);
int cmd_evolve(const Settings& s, const std::filesystem::path& out);
int cmd_trajectories(const Settings& s, const std::filesystem::path& out);
int cmd_dwell(const Settings& s, const std::filesystem::path& out);
int cmd_sweep(const Settings& s, const std::filesystem::path& out);

}  // namespace cwave::cli

#endif  // CWAVE_CLI_HPP
