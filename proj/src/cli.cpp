#include "cwave/cli.hpp"

#include "cwave/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace cwave::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw InputError("config key '" + key + "': '" + text + "' is not a finite number");
  }
  return v;
}

std::size_t parse_size(const std::string& key, const std::string& text) {
  unsigned long long v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw InputError("config key '" + key + "': '" + text + "' is not a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InputError("config key '" + key + "': '" + text + "' is not a boolean");
}

std::optional<double> parse_optional(const std::string& key, const std::string& text) {
  if (text == "auto") return std::nullopt;
  return parse_double(key, text);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

std::string show(double v) { return csv::number(v); }
std::string show(std::size_t v) { return std::to_string(v); }
std::string show(bool v) { return v ? "true" : "false"; }
std::string show(const std::optional<double>& v) { return v ? show(*v) : "auto"; }
std::string show(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + show(v[i]);
  return s;
}

struct Entry {
  const char* key;
  const char* doc;
  std::function<void(Settings&, const std::string&)> set;
  std::function<std::string(const Settings&)> get;
};

// Binds a key to a Settings member via a projection.
template <typename Proj>
Entry bind(const char* key, const char* doc, Proj proj) {
  using T = std::remove_cvref_t<decltype(proj(std::declval<Settings&>()))>;
  Entry e{key, doc, {}, {}};
  e.set = [key, proj](Settings& s, const std::string& v) {
    auto& field = proj(s);
    if constexpr (std::is_same_v<T, double>) {
      field = parse_double(key, v);
    } else if constexpr (std::is_same_v<T, bool>) {
      field = parse_bool(key, v);
    } else if constexpr (std::is_same_v<T, std::size_t>) {
      field = parse_size(key, v);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      field = parse_size(key, v);
    } else if constexpr (std::is_same_v<T, std::optional<double>>) {
      field = parse_optional(key, v);
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      field = parse_list(key, v);
    } else {
      field = v;
    }
  };
  e.get = [proj](const Settings& s) {
    auto& field = proj(const_cast<Settings&>(s));
    if constexpr (std::is_same_v<T, std::string>) {
      return field;
    } else if constexpr (std::is_same_v<T, std::uint64_t> && !std::is_same_v<std::uint64_t, std::size_t>) {
      return std::to_string(field);
    } else {
      return show(field);
    }
  };
  return e;
}

#define CWAVE_KEY(key, doc, member) bind(key, doc, [](Settings& s) -> auto& { return s.member; })

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      CWAVE_KEY("m", "effective mass [s/m^2]", params.m),
      CWAVE_KEY("V0", "step height [1/s]", params.V0),
      CWAVE_KEY("J0", "guide coupling [1/s]", params.J0),
      CWAVE_KEY("delta", "detuning E - V0 + J0 [1/s]", delta),
      CWAVE_KEY("E", "energy [1/s]; overrides delta unless auto", energy),
      CWAVE_KEY("exact", "exact quartic dispersion instead of the |delta| >> J0 form", exact),
      CWAVE_KEY("guard_ratio", "smallest |delta|/J0 accepted by the approximate wavenumbers", guard_ratio),
      CWAVE_KEY("seed", "ensemble seed", seed),
      CWAVE_KEY("workers", "worker threads for ensembles and sweeps", workers),
      CWAVE_KEY("t_max", "two-state end time [s]; auto = pi/(2 J0)", t_max),
      CWAVE_KEY("steps", "two-state time intervals", steps),
      CWAVE_KEY("x_min", "stationary grid left end [m]", x_min),
      CWAVE_KEY("x_max", "stationary grid right end [m]", x_max),
      CWAVE_KEY("dx", "stationary grid spacing [m]", dx),
      CWAVE_KEY("amplitude", "stationary amplitude A", amplitude),
      CWAVE_KEY("floor_fraction", "density floor as a fraction of the peak density", floor_fraction),
      CWAVE_KEY("packet.sigma", "packet width or ramp width [m]", sigma),
      CWAVE_KEY("packet.x0", "packet center [m]; auto = -10 sigma - plateau/2", x0),
      CWAVE_KEY("packet.plateau", "flat-top length [m]; 0 gives a Gaussian", plateau),
      CWAVE_KEY("packet.k", "carrier wavenumber [1/m]; auto matches E on the grid", k),
      CWAVE_KEY("packet.min_sigma_k", "smallest accepted sigma*k", min_sigma_k),
      CWAVE_KEY("evolve.dx", "evolution grid spacing [m]", evolve_dx),
      CWAVE_KEY("evolve.x_min", "evolution grid left end [m]; auto from the packet", evolve_x_min),
      CWAVE_KEY("evolve.x_max", "evolution grid right end [m]; auto from the wavenumbers", evolve_x_max),
      CWAVE_KEY("evolve.dt", "time step [s]; 0 = 0.2/max(|V|, k_max^2/2m)", dt),
      CWAVE_KEY("evolve.t_end", "end time [s]; auto = round trip of the packet center", t_end),
      CWAVE_KEY("evolve.stride", "steps between recorded rows", stride),
      CWAVE_KEY("evolve.edge_tolerance", "largest density fraction allowed near the edges", edge_tolerance),
      CWAVE_KEY("evolve.energy_reference", "energy subtracted from H while stepping [1/s]; auto = E", energy_reference),
      CWAVE_KEY("bohm.count", "ensemble size", count),
      CWAVE_KEY("bohm.cadence", "steps between histogram checks", cadence),
      CWAVE_KEY("bohm.bins", "histogram bins per guide", bins),
      CWAVE_KEY("bohm.velocity_scale", "velocity multiplier (1 except for controls)", velocity_scale),
      CWAVE_KEY("bohm.max_cells", "largest drift per sub-step in grid cells; 0 = one midpoint step", max_cells),
      CWAVE_KEY("bohm.trajectory_stride", "steps between trajectory rows; 0 disables", trajectory_stride),
      CWAVE_KEY("bohm.trajectory_particles", "particles written to the trajectory file; 0 = all",
                trajectory_particles),
      CWAVE_KEY("dwell.source", "analytic or tdse", dwell_source),
      CWAVE_KEY("dwell.fringe_periods", "fringe periods left of the step used for |C_I|", fringe_periods),
      CWAVE_KEY("dwell.zero_current", "|j_in| below this times |C_I|^2 k0/m counts as zero", zero_current),
      CWAVE_KEY("pipeline.dx", "grid spacing [m]", pipeline.dx),
      CWAVE_KEY("pipeline.sigma", "ramp width [m]", pipeline.sigma),
      CWAVE_KEY("pipeline.plateau_sigmas", "plateau length / sigma", pipeline.plateau_sigmas),
      CWAVE_KEY("pipeline.gap_sigmas", "leading ramp to step distance / sigma", pipeline.gap_sigmas),
      CWAVE_KEY("pipeline.margin_sigmas", "tail clearance / sigma", pipeline.margin_sigmas),
      CWAVE_KEY("pipeline.dt", "time step [s]; 0 = default rule", pipeline.dt),
      CWAVE_KEY("pipeline.window_steps", "steps in the quasi-stationary window", pipeline.window_steps),
      CWAVE_KEY("pipeline.window_max_pa", "largest p_a used by the k1 fit", pipeline.window_max_pa),
      CWAVE_KEY("pipeline.guard_ratio", "approximate-wavenumber guard used by the pipeline", pipeline.guard_ratio),
      CWAVE_KEY("pipeline.discrete_carrier", "carrier wavenumber matched to the grid dispersion",
                pipeline.discrete_carrier),
      CWAVE_KEY("pipeline.energy_frame", "step with H - E instead of H", pipeline.energy_frame),
      CWAVE_KEY("pipeline.max_drift", "largest relative stored-number drift in the window", pipeline.max_drift),
      CWAVE_KEY("sweep.deltas", "comma-separated detunings [1/s]", deltas),
  };
  return entries;
}

#undef CWAVE_KEY

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream f(dir / name);
  if (!f) throw RunError("cannot write " + (dir / name).string());
  f.precision(17);
  return f;
}

void describe(std::ostream& out, const Settings& s, const EnergySpec& spec) {
  std::ostringstream line;
  line << "m=" << csv::number(s.params.m) << " s/m^2, V0=" << csv::number(s.params.V0)
       << " 1/s, J0=" << csv::number(s.params.J0) << " 1/s, E=" << csv::number(spec.E)
       << " 1/s, delta=" << csv::number(spec.delta) << " 1/s, regime=" << to_string(spec.regime);
  csv::comment(out, line.str());
}

}  // namespace

KeyValues KeyValues::parse(std::istream& in, const std::string& origin) {
  KeyValues kv;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(origin + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InputError(origin + ":" + std::to_string(number) + ": empty key");
    kv.values_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file " + path.string());
  return parse(in, path.string());
}

void KeyValues::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw InputError("override '" + assignment + "' is not key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void KeyValues::set(const std::string& key, const std::string& value) {
  if (key.empty()) throw InputError("override has an empty key");
  values_[key] = value;
}

Settings settings_from(const KeyValues& kv) {
  Settings s;
  const auto& reg = registry();
  for (const auto& [key, value] : kv.values()) {
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const Entry& e) { return key == e.key; });
    if (it == reg.end()) throw InputError("unknown config key '" + key + "'");
    it->set(s, value);
  }
  s.params.validate();
  if (s.dwell_source != "analytic" && s.dwell_source != "tdse") {
    throw InputError("dwell.source must be 'analytic' or 'tdse'");
  }
  if (!s.delta && !s.energy) throw InputError("either delta or E must be set");
  return s;
}

void write_defaults(std::ostream& out) {
  const Settings s;
  for (const Entry& e : registry()) out << "# " << e.doc << '\n' << e.key << " = " << e.get(s) << '\n';
}

EnergySpec Settings::energy_spec() const {
  return energy ? cwave::energy_spec(params, *energy) : energy_spec_from_delta(params, *delta);
}

Scattering make_scattering(const Settings& s) {
  const EnergySpec spec = s.energy_spec();
  const double m = s.params.m;
  const double k = s.k ? *s.k : discrete_carrier_wavenumber(spec.E, m, s.evolve_dx);
  const double v0 = std::sin(k * s.evolve_dx) / (m * s.evolve_dx);
  const double x0 = s.x0 ? *s.x0 : -10.0 * s.sigma - 0.5 * s.plateau;
  const PacketSpec packet{x0, s.sigma, k, s.plateau, s.min_sigma_k};

  const double reach = -x0 + 0.5 * s.plateau + 12.0 * s.sigma;
  const double x_min = s.evolve_x_min ? *s.evolve_x_min : -reach;
  double x_max = 0.0;
  if (s.evolve_x_max) {
    x_max = *s.evolve_x_max;
  } else {
    // Transmitted modes run at up to (k2 + k1)/m; evanescent ones decay as exp(-(k2 - k1) x).
    const Wavenumbers w = wavenumbers(s.params, spec, {true, 0.0});
    x_max = spec.regime == Regime::Allowed ? reach * (w.k2 + w.k1) / (m * v0) + 12.0 * s.sigma
                                           : 60.0 / (w.k2 - w.k1);
  }
  Grid grid = Grid::with_spacing(x_min, x_max, s.evolve_dx);
  PotentialProfile potential = build_potential(s.params, grid);
  FieldPair initial = wave_packet(grid, packet);
  EvolveConfig ecfg;
  ecfg.dt = s.dt > 0.0 ? s.dt : default_time_step(potential, m, packet);
  ecfg.t_end = s.t_end ? *s.t_end : -2.0 * x0 / v0;
  ecfg.snapshot_stride = std::max<std::size_t>(1, s.stride);
  ecfg.edge_tolerance = s.edge_tolerance;
  ecfg.energy_reference = s.energy_reference ? *s.energy_reference : spec.E;
  return {s.params, spec, packet, std::move(grid), std::move(potential), std::move(initial), ecfg};
}

void write_state(std::ostream& out, const FieldPair& field, const GuidanceField* guide) {
  csv::comment(out, "x [m]; psi in 1/sqrt(m); p_a = |psi_a|^2 / (|psi_m|^2 + |psi_a|^2)");
  if (guide) csv::comment(out, "v_m v_a [m/s]; sigma_m sigma_a [1/s]; zero on nodes below the density floor");
  const PaProfile pa = pa_profile(field);
  if (guide) {
    csv::row(out, "x", "re_psi_m", "im_psi_m", "re_psi_a", "im_psi_a", "p_a", "v_m", "v_a", "sigma_m", "sigma_a");
  } else {
    csv::row(out, "x", "re_psi_m", "im_psi_m", "re_psi_a", "im_psi_a", "p_a");
  }
  for (Eigen::Index i = 0; i < field.grid.n(); ++i) {
    const double x = field.grid.x(i);
    const Complex m = field.psi_m(i), a = field.psi_a(i);
    if (guide) {
      csv::row(out, x, m.real(), m.imag(), a.real(), a.imag(), pa.pa(i), guide->v_m(i), guide->v_a(i),
               guide->sigma_m(i), guide->sigma_a(i));
    } else {
      csv::row(out, x, m.real(), m.imag(), a.real(), a.imag(), pa.pa(i));
    }
  }
}

int cmd_two_state(const Settings& s, const std::filesystem::path& out) {
  if (!(s.params.J0 > 0.0) && !s.t_max) throw InputError("t_max must be given when J0 = 0");
  const double t_max = s.t_max ? *s.t_max : M_PI / (2.0 * s.params.J0);
  if (!(t_max > 0.0)) throw InputError("t_max must be positive");
  if (s.steps == 0) throw InputError("steps must be at least 1");
  auto f = open_output(out, "two_state.csv");
  csv::comment(f, "isolated two-level system starting in the main guide; J0=" + csv::number(s.params.J0) + " 1/s");
  csv::comment(f, "t [s]; p_m p_a dimensionless");
  csv::row(f, "t", "p_m", "p_a");
  for (std::size_t i = 0; i <= s.steps; ++i) {
    const double t = i == s.steps ? t_max : t_max * static_cast<double>(i) / static_cast<double>(s.steps);
    const auto [cm, ca] = two_state_evolve(s.params.J0, t);
    csv::row(f, t, std::norm(cm), std::norm(ca));
  }
  return 0;
}

int cmd_stationary(const Settings& s, const std::filesystem::path& out) {
  const EnergySpec spec = s.energy_spec();
  const Wavenumbers k = wavenumbers(s.params, spec, s.wavenumber_options());
  const Grid grid = Grid::with_spacing(s.x_min, s.x_max, s.dx);
  const FieldPair state = stationary_state(k, spec.regime, grid, Complex(s.amplitude, 0.0));
  const PotentialProfile potential = build_potential(s.params, grid);
  const GuidanceField guide = guidance(state, potential, s.params.m, s.floor_fraction);
  const MatchingCoefficients c = matching_coefficients(k, spec.regime, Complex(s.amplitude, 0.0));
  const PaProfile pa = pa_profile(state);
  const K1Fit fit = fit_k1(pa.pa, grid, s.pipeline.window_max_pa, &pa.valid);

  auto f = open_output(out, "stationary.csv");
  csv::comment(f, "analytic stationary state");
  describe(f, s, spec);
  csv::comment(f, "k0=" + csv::number(k.k0) + " k1=" + csv::number(k.k1) + " k2=" + csv::number(k.k2) +
                      " [1/m]; " + (k.exact ? "exact" : "approximate") + " dispersion");
  csv::comment(f, "|C_R/C_I|=" + csv::number(std::abs(c.c_r / c.c_i)) + "; fitted k1_hat=" +
                      csv::number(fit.k1_hat) + " 1/m; v_hat=J0/k1_hat=" +
                      csv::number(inferred_speed(fit.k1_hat, s.params.J0)) + " m/s; sqrt(2|delta|/m)=" +
                      csv::number(apparent_speed(spec.delta, s.params.m)) + " m/s");
  write_state(f, state, &guide);
  return 0;
}

int cmd_evolve(const Settings& s, const std::filesystem::path& out) {
  const Scattering sc = make_scattering(s);
  auto series = open_output(out, "evolve_series.csv");
  csv::comment(series, "packet scattering off the step");
  describe(series, s, sc.spec);
  csv::comment(series, "t [s]; norm, left (x<0) and stored (x>=0) probabilities dimensionless");
  csv::row(series, "step", "t", "norm", "left", "stored");
  const EvolveResult r = evolve(sc.initial, sc.potential, s.params.m, sc.evolve,
                                {[&](const FieldPair& f, std::size_t step) {
                                  csv::row(series, step, f.t, f.norm(), left_norm(f), stored_number(f));
                                }});
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';

  auto state = open_output(out, "evolve_final.csv");
  csv::comment(state, "final state at t=" + csv::number(r.final_state.t) + " s");
  write_state(state, r.final_state);

  const double reflected = left_norm(r.final_state) / r.initial_norm;
  const double transmitted = stored_number(r.final_state) / r.initial_norm;
  auto summary = open_output(out, "evolve_summary.csv");
  describe(summary, s, sc.spec);
  csv::comment(summary, "reflected and transmitted are fractions of the initial norm");
  csv::row(summary, "quantity", "value");
  csv::row(summary, "steps", r.steps);
  csv::row(summary, "dt", sc.evolve.dt);
  csv::row(summary, "t_end", r.final_state.t);
  csv::row(summary, "nodes", sc.grid.n());
  csv::row(summary, "initial_norm", r.initial_norm);
  csv::row(summary, "final_norm", r.final_norm);
  csv::row(summary, "norm_drift", r.final_norm - r.initial_norm);
  csv::row(summary, "reflected_norm", reflected);
  csv::row(summary, "transmitted_norm", transmitted);
  std::cout << "reflected_norm=" << csv::number(reflected) << " transmitted_norm=" << csv::number(transmitted)
            << " norm_drift=" << csv::number(r.final_norm - r.initial_norm) << '\n';
  return 0;
}

int cmd_trajectories(const Settings& s, const std::filesystem::path& out) {
  const Scattering sc = make_scattering(s);
  BohmianRunConfig cfg;
  cfg.evolve = sc.evolve;
  cfg.count = s.count;
  cfg.seed = s.seed;
  cfg.cadence = std::max<std::size_t>(1, s.cadence);
  cfg.bins = s.bins;
  cfg.floor_fraction = s.floor_fraction;
  cfg.advance = {s.velocity_scale, s.workers, s.max_cells};
  cfg.trajectory_stride = s.trajectory_stride;
  cfg.trajectory_particles = s.trajectory_particles;

  auto traj = open_output(out, "trajectories.csv");
  auto dist = open_output(out, "histogram_distance.csv");
  auto dwell = open_output(out, "particle_dwell.csv");
  if (s.count == 0) {
    csv::comment(traj, "empty ensemble");
    csv::row(traj, "t", "id", "sector", "x");
    csv::row(dist, "step", "t", "distance");
    csv::row(dwell, "id", "entered", "inside_at_end", "entries", "first_entry", "last_exit", "residence");
    return 0;
  }
  const BohmianRunResult r = run_bohmian(sc.initial, sc.potential, s.params.m, cfg);

  describe(traj, s, sc.spec);
  csv::comment(traj, "seed=" + std::to_string(s.seed) + "; t [s]; x [m]; sector main|aux");
  csv::row(traj, "t", "id", "sector", "x");
  for (const auto& p : r.trajectories) csv::row(traj, p.t, p.id, to_string(p.sector), p.x);

  describe(dist, s, sc.spec);
  csv::comment(dist, "total-variation distance between particle and Born histograms; " + std::to_string(s.bins) +
                         " bins per guide; t [s]");
  csv::row(dist, "step", "t", "distance");
  for (const auto& d : r.distances) csv::row(dist, d.step, d.t, d.distance);

  describe(dwell, s, sc.spec);
  csv::comment(dwell, "residence in x >= 0 per particle; times [s]");
  csv::comment(dwell, "entered=" + csv::number(r.dwell.fraction_entered) + " trapped=" +
                          csv::number(r.dwell.fraction_trapped) + " never_entered=" +
                          csv::number(r.dwell.fraction_never_entered) + " mean_residence=" +
                          csv::number(r.dwell.mean_residence) + " s; jumps=" +
                          std::to_string(r.ensemble.diagnostics.jumps) + " masked_entries=" +
                          std::to_string(r.ensemble.diagnostics.masked_entries));
  csv::row(dwell, "id", "entered", "inside_at_end", "entries", "first_entry", "last_exit", "residence");
  for (const auto& p : r.dwell.particles) {
    csv::row(dwell, p.id, int(p.entered), int(p.inside_at_end), p.entries, p.first_entry, p.last_exit, p.residence);
  }
  if (r.ensemble.diagnostics.masked_entries > 0) {
    std::cerr << "warning: " << r.ensemble.diagnostics.masked_entries << " particle steps ended below the density floor\n";
  }
  return 0;
}

int cmd_dwell(const Settings& s, const std::filesystem::path& out) {
  const EnergySpec spec = s.energy_spec();
  const DwellOptions opts{s.fringe_periods, s.zero_current};
  DwellTime bohm, std_;
  std::string source;
  if (s.dwell_source == "analytic") {
    const Wavenumbers k = wavenumbers(s.params, spec, s.wavenumber_options());
    const Grid grid = Grid::with_spacing(s.x_min, s.x_max, s.dx);
    const FieldPair state = stationary_state(k, spec.regime, grid, Complex(s.amplitude, 0.0));
    bohm = dwell_time(state, s.params, spec, DwellVariant::Bohmian, opts);
    std_ = dwell_time(state, s.params, spec, DwellVariant::Standard, opts);
    source = "analytic stationary state";
  } else {
    const PipelineResult r = run_pipeline(s.params, spec, s.pipeline);
    bohm = dwell_time(r.center, s.params, spec, DwellVariant::Bohmian, opts);
    std_ = dwell_time(r.center, s.params, spec, DwellVariant::Standard, opts);
    source = "quasi-stationary TDSE window";
  }
  auto f = open_output(out, "dwell.csv");
  csv::comment(f, "dwell time tau = N / j_in from the " + source);
  describe(f, s, spec);
  csv::comment(f, "tau [s]; stored = probability in x >= 0; j_in [1/s]; inf = zero net current");
  csv::row(f, "variant", "tau", "stored", "j_in", "j_reference", "c_i", "c_r");
  for (const auto& [name, d] : {std::pair{DwellVariant::Bohmian, bohm}, std::pair{DwellVariant::Standard, std_}}) {
    csv::row(f, to_string(name), d.tau, d.stored, d.j_in, d.j_reference, d.fringe.c_i, d.fringe.c_r);
  }
  std::cout << "tau_bohmian=" << csv::number(bohm.tau) << " tau_standard=" << csv::number(std_.tau) << '\n';
  return 0;
}

int cmd_sweep(const Settings& s, const std::filesystem::path& out) {
  const std::vector<SweepRow> rows = sweep(s.params, s.deltas, s.pipeline, s.workers);
  auto f = open_output(out, "sweep.csv");
  write_sweep_csv(f, rows);
  bool ok = true;
  for (const auto& r : rows) {
    if (!r.ok) {
      ok = false;
      std::cerr << "sweep row delta=" << csv::number(r.delta) << " failed: " << r.error << '\n';
    }
  }
  return ok ? 0 : 1;
}

}  // namespace cwave::cli
