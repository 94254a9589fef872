#include "cwave/analysis.hpp"

#include "cwave/csv.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace cwave {

K1Fit fit_k1(const RealArray& pa, const Grid& grid, double window_max_pa, const MaskArray* valid,
             std::size_t min_nodes) {
  if (pa.size() != grid.n()) throw InputError("p_a profile does not match the grid");
  double sxx = 0.0, sxy = 0.0;
  std::vector<std::pair<double, double>> pts;
  for (Eigen::Index i = grid.origin(); i < grid.n(); ++i) {
    const double p = pa(i);
    if ((valid && !(*valid)(i)) || !std::isfinite(p) || p > window_max_pa) break;
    const double x = grid.x(i);
    const double y = std::sqrt(std::max(p, 0.0));
    pts.emplace_back(x, y);
    sxx += x * x;
    sxy += x * y;
  }
  if (pts.size() < min_nodes || !(sxx > 0.0)) {
    std::ostringstream msg;
    msg << "k1 fit window has " << pts.size() << " nodes (need " << min_nodes
        << "); refine the grid or raise window_max_pa";
    throw InputError(msg.str());
  }
  K1Fit fit;
  fit.k1_hat = sxy / sxx;
  fit.nodes = pts.size();
  double ss = 0.0;
  for (const auto& [x, y] : pts) ss += (y - fit.k1_hat * x) * (y - fit.k1_hat * x);
  fit.stderr = std::sqrt(ss / static_cast<double>(pts.size() - 1) / sxx);
  return fit;
}

double inferred_speed(double k1_hat, double J0) {
  if (!(k1_hat > 0.0)) throw InputError("inferred speed needs k1_hat > 0");
  return J0 / k1_hat;
}

namespace {

// Vertex of the parabola through (i-1, i, i+1).
double refine_extremum(const RealArray& y, Eigen::Index i) {
  if (i <= 0 || i + 1 >= y.size()) return y(i);
  const double curvature = y(i + 1) - 2.0 * y(i) + y(i - 1);
  if (curvature == 0.0) return y(i);
  const double slope = y(i + 1) - y(i - 1);
  return y(i) - slope * slope / (8.0 * curvature);
}

}  // namespace

FringeAmplitudes fringe_amplitudes(const FieldPair& field, double k0, double periods) {
  if (!(k0 > 0.0)) throw InputError("fringe analysis needs k0 > 0");
  const Grid& grid = field.grid;
  const double span = periods * M_PI / k0;
  const Eigen::Index last = grid.origin() - 1;
  const Eigen::Index first = std::max<Eigen::Index>(1, grid.nearest(-span));
  // At least one full fringe period and a few nodes per period.
  if (last - first < 8 || span < M_PI / k0 || grid.x(first) > -M_PI / k0) {
    throw RunError("fringe extraction failed: the window left of the step is too short");
  }
  const RealArray rho = field.psi_m.abs2();
  Eigen::Index i_max = first, i_min = first;
  for (Eigen::Index i = first; i <= last; ++i) {
    if (rho(i) > rho(i_max)) i_max = i;
    if (rho(i) < rho(i_min)) i_min = i;
  }
  FringeAmplitudes f;
  f.rho_max = refine_extremum(rho, i_max);
  f.rho_min = std::max(0.0, refine_extremum(rho, i_min));
  if (!(f.rho_max > 0.0)) throw RunError("fringe extraction failed: no density left of the step");
  const double hi = std::sqrt(f.rho_max);
  const double lo = std::sqrt(f.rho_min);
  f.c_i = 0.5 * (hi + lo);
  f.c_r = 0.5 * (hi - lo);
  return f;
}

std::string to_string(DwellVariant v) { return v == DwellVariant::Bohmian ? "bohmian" : "standard"; }

DwellTime dwell_time(const FieldPair& field, const PhysicalParams& params, const EnergySpec& spec,
                     DwellVariant variant, const DwellOptions& opts) {
  const double k0 = std::sqrt(2.0 * params.m * spec.E);
  DwellTime d;
  d.stored = stored_number(field);
  d.fringe = fringe_amplitudes(field, k0, opts.fringe_periods);
  d.j_reference = d.fringe.c_i * d.fringe.c_i * k0 / params.m;
  if (variant == DwellVariant::Standard) {
    d.j_in = d.j_reference;
  } else {
    const Eigen::Index i = field.grid.origin() - 1;
    const RealArray j = probability_current(field.psi_m.segment(i - 1, 3), field.grid.dx(), params.m);
    d.j_in = j(1);
  }
  if (std::abs(d.j_in) < opts.zero_current * d.j_reference) {
    d.tau = std::numeric_limits<double>::infinity();
  } else {
    d.tau = d.stored / d.j_in;
  }
  return d;
}

DwellTime dwell_time(std::span<const FieldPair> snapshots, const TimeWindow& window, const PhysicalParams& params,
                     const EnergySpec& spec, DwellVariant variant, const DwellOptions& opts, double max_drift) {
  // Reuses the plateau test; throws RunError off-plateau.
  quasi_stationary_pa(snapshots, window, max_drift);
  const double center = 0.5 * (window.t_begin + window.t_end);
  const FieldPair* best = &snapshots.front();
  for (const auto& s : snapshots) {
    if (std::abs(s.t - center) < std::abs(best->t - center)) best = &s;
  }
  return dwell_time(*best, params, spec, variant, opts);
}

double discrete_carrier_wavenumber(double E, double mass, double dx) {
  const double c = 1.0 - mass * E * dx * dx;
  if (!(c > -1.0)) throw InputError("grid too coarse to carry this energy");
  return std::acos(c) / dx;
}

PipelineResult run_pipeline(const PhysicalParams& params, const EnergySpec& spec, const PipelineConfig& config,
                            const std::vector<SnapshotObserver>& observers) {
  const double m = params.m;
  const Wavenumbers approx = wavenumbers(params, spec, {false, config.guard_ratio});
  const Wavenumbers exact = wavenumbers(params, spec, {true, config.guard_ratio});

  const double sigma = config.sigma;
  const double plateau = config.plateau_sigmas * sigma;
  const double k = config.discrete_carrier ? discrete_carrier_wavenumber(spec.E, m, config.dx) : approx.k0;
  const double v0 = std::sin(k * config.dx) / (m * config.dx);
  const double lead = -config.gap_sigmas * sigma;
  const double x0 = lead - 0.5 * plateau;
  const double x_left = x0 - 0.5 * plateau - config.margin_sigmas * sigma;
  double x_right = 0.0;
  if (spec.regime == Regime::Allowed) {
    // Fastest transmitted mode moves at (k2 + k1)/m; ramps are compressed accordingly.
    const double ratio = (exact.k2 + exact.k1) / m / v0;
    x_right = (0.5 * plateau + config.gap_sigmas * sigma + config.margin_sigmas * sigma) * ratio;
  } else {
    x_right = 60.0 / (exact.k2 - exact.k1);
  }
  x_right += config.margin_sigmas * sigma * 0.25;

  PipelineResult r{spec, approx, exact, Grid::with_spacing(x_left, x_right, config.dx), FieldPair(Grid(-1, 1, 3)),
                   {}, {}, 0.0, apparent_speed(spec.delta, m), {}, {}, 0, 0.0};
  const PotentialProfile potential = build_potential(params, r.grid);
  const PacketSpec packet{x0, sigma, k, plateau};
  const FieldPair initial = wave_packet(r.grid, packet);
  const double dt = config.dt > 0.0 ? config.dt : default_time_step(potential, m, packet);

  const double t_mid = -x0 / v0;
  const double half = 0.5 * static_cast<double>(config.window_steps) * dt;
  const TimeWindow window{t_mid - half, t_mid + half};
  std::vector<FieldPair> snapshots;
  EvolveConfig ecfg{dt, window.t_end, 1};
  if (config.energy_frame) ecfg.energy_reference = spec.E;
  std::vector<SnapshotObserver> all = observers;
  all.push_back([&](const FieldPair& f, std::size_t) {
    if (f.t >= window.t_begin - 0.5 * dt) snapshots.push_back(f);
  });
  const EvolveResult run = evolve(initial, potential, m, ecfg, all);
  r.steps = run.steps;
  r.norm_drift = run.final_norm - run.initial_norm;
  const TimeWindow used{snapshots.front().t, snapshots.back().t};
  r.pa = quasi_stationary_pa(snapshots, used, config.max_drift);
  r.fit = fit_k1(r.pa.pa, r.grid, config.window_max_pa, &r.pa.valid);
  r.v_hat = inferred_speed(r.fit.k1_hat, params.J0);
  r.dwell_bohmian = dwell_time(snapshots, used, params, spec, DwellVariant::Bohmian, {}, config.max_drift);
  r.dwell_standard = dwell_time(snapshots, used, params, spec, DwellVariant::Standard, {}, config.max_drift);
  const double center = 0.5 * (used.t_begin + used.t_end);
  const FieldPair* best = &snapshots.front();
  for (const auto& s : snapshots) {
    if (std::abs(s.t - center) < std::abs(best->t - center)) best = &s;
  }
  r.center = *best;
  return r;
}

std::vector<SweepRow> sweep(const PhysicalParams& params, std::span<const double> deltas,
                            const PipelineConfig& config, std::size_t workers) {
  std::vector<SweepRow> rows(deltas.size());
  const auto run_row = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.delta = deltas[i];
    row.regime = deltas[i] > 0.0 ? Regime::Allowed : Regime::Forbidden;
    try {
      const EnergySpec spec = energy_spec_from_delta(params, deltas[i]);
      row.regime = spec.regime;
      row.speed = apparent_speed(spec.delta, params.m);
      const PipelineResult r = run_pipeline(params, spec, config);
      row.k1 = r.approx.k1;
      row.k1_exact = r.exact.k1;
      row.speed_exact = r.exact.k2 / params.m;
      row.k1_hat = r.fit.k1_hat;
      row.k1_stderr = r.fit.stderr;
      row.v_hat = r.v_hat;
      row.tau_bohmian = r.dwell_bohmian.tau;
      row.tau_standard = r.dwell_standard.tau;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  };
  const std::size_t n_workers = std::max<std::size_t>(1, std::min(workers, rows.size()));
  if (n_workers == 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) run_row(i);
    return rows;
  }
  std::mutex mu;
  std::size_t next = 0;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= rows.size()) return;
          i = next++;
        }
        run_row(i);
      }
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  csv::comment(out, "energy-speed sweep; hbar = 1");
  csv::comment(out, "delta [1/s], k1 k1_exact k1_hat k1_stderr [1/m], speed speed_exact v_hat [m/s], "
                    "tau_bohmian tau_standard [s]");
  csv::comment(out, "speed = sqrt(2|delta|/m); speed_exact = k2/m from the exact dispersion; v_hat = J0/k1_hat");
  csv::row(out, "delta", "regime", "k1", "k1_exact", "k1_hat", "k1_stderr", "speed", "speed_exact", "v_hat",
           "v_hat_over_speed", "tau_bohmian", "tau_standard", "status", "error");
  for (const SweepRow& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    csv::row(out, r.delta, to_string(r.regime), r.k1, r.k1_exact, r.k1_hat, r.k1_stderr, r.speed, r.speed_exact,
             r.v_hat, r.v_hat / r.speed, r.tau_bohmian, r.tau_standard, std::string(r.ok ? "ok" : "failed"), err);
  }
}

}  // namespace cwave
