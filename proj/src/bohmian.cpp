#include "cwave/bohmian.hpp"

#include "cwave/rng.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace cwave {

GuidanceField guidance(const FieldPair& field, const PotentialProfile& potential, double mass,
                       double floor_fraction) {
  const Grid& grid = field.grid;
  const Eigen::Index n = grid.n();
  if (!(potential.grid == grid)) throw InputError("field and potential grids differ");

  const RealArray rho_m = field.density_main();
  const RealArray rho_a = field.density_aux();
  const double floor = floor_fraction * (rho_m + rho_a).maxCoeff();
  GuidanceField g{grid,          field.t,       RealArray::Zero(n), RealArray::Zero(n), RealArray::Zero(n),
                  RealArray::Zero(n), rho_m > floor, rho_a > floor, floor};

  const RealArray j_m = probability_current(field.psi_m, grid.dx(), mass);
  const RealArray j_a = probability_current(field.psi_a, grid.dx(), mass);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Net flow main -> aux per unit time: i V_i (psi_m^* psi_a - psi_a^* psi_m).
    const double flow = -2.0 * potential.v_i(i) * std::imag(std::conj(field.psi_m(i)) * field.psi_a(i));
    if (g.occupied_m(i)) {
      g.v_m(i) = j_m(i) / rho_m(i);
      g.sigma_m(i) = std::max(flow, 0.0) / rho_m(i);
    }
    if (g.occupied_a(i)) {
      g.v_a(i) = j_a(i) / rho_a(i);
      g.sigma_a(i) = std::max(-flow, 0.0) / rho_a(i);
    }
  }
  return g;
}

std::size_t Ensemble::alive_count() const {
  return static_cast<std::size_t>(
      std::count_if(particles.begin(), particles.end(), [](const Particle& p) { return p.alive; }));
}

std::size_t Ensemble::count_in(Sector s) const {
  return static_cast<std::size_t>(std::count_if(particles.begin(), particles.end(),
                                                [s](const Particle& p) { return p.alive && p.sector == s; }));
}

Ensemble sample_ensemble(const FieldPair& field, std::size_t count, std::uint64_t seed, double floor_fraction) {
  const Grid& grid = field.grid;
  const Eigen::Index n = grid.n();
  const RealArray rho_m = field.density_main();
  const RealArray rho_a = field.density_aux();
  const double floor = floor_fraction * (rho_m + rho_a).maxCoeff();

  std::vector<double> cdf(static_cast<std::size_t>(2 * n));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += rho_m(i) > floor ? rho_m(i) : 0.0;
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += rho_a(i) > floor ? rho_a(i) : 0.0;
    cdf[static_cast<std::size_t>(n + i)] = acc;
  }
  if (!(acc > 0.0)) throw InputError("cannot sample particles from a zero-norm field");

  Ensemble ens;
  ens.seed = seed;
  ens.particles.resize(count);
  for (std::size_t p = 0; p < count; ++p) {
    // Counter block 0 of every particle stream is reserved for sampling.
    CounterRng rng(seed, p, 0);
    const double target = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.end()) --it;
    const auto flat = static_cast<Eigen::Index>(it - cdf.begin());
    const Sector sector = flat < n ? Sector::Main : Sector::Aux;
    const Eigen::Index node = flat < n ? flat : flat - n;
    double x = grid.x(node) + (rng.uniform() - 0.5) * grid.dx();
    x = std::clamp(x, grid.x(0), grid.x(n - 1));
    if (sector == Sector::Aux) x = std::max(x, 0.0);
    ens.particles[p] = Particle{p, sector, x, true};
  }
  return ens;
}

namespace {

struct Stencil {
  Eigen::Index i;
  double w;
};

inline Stencil locate(const Grid& grid, double x) {
  const double u = x / grid.dx() + static_cast<double>(grid.origin());
  const double max_i = static_cast<double>(grid.n() - 2);
  const double fi = std::clamp(std::floor(u), 0.0, max_i);
  return {static_cast<Eigen::Index>(fi), std::clamp(u - fi, 0.0, 1.0)};
}

inline double sample(const RealArray& a, const Stencil& s) {
  return (1.0 - s.w) * a(s.i) + s.w * a(s.i + 1);
}

// Field value at fraction tau of the step between two snapshots.
inline double sample_at(const RealArray& a0, const RealArray& a1, const Stencil& s, double tau) {
  return (1.0 - tau) * sample(a0, s) + tau * sample(a1, s);
}

// Each step owns a block of counters in a particle's stream; block 0 is sampling.
constexpr unsigned kStepBlockBits = 20;

void advance_range(std::span<Particle> particles, const GuidanceField& g0, const GuidanceField& g1, double dt,
                   std::uint64_t seed, std::uint64_t step_index, const AdvanceOptions& opts,
                   EnsembleDiagnostics& diag) {
  const Grid& grid = g0.grid;
  const double lo = grid.x(0);
  const double hi = grid.x(grid.n() - 1);
  const double reach = opts.max_cells * grid.dx();
  const double min_h = 1.0 / static_cast<double>(std::max<std::size_t>(1, opts.max_substeps));
  const double vscale = opts.velocity_scale;
  for (Particle& p : particles) {
    if (!p.alive) continue;
    CounterRng rng(seed, p.id, (step_index + 1) << kStepBlockBits);
    double tau = 0.0;
    while (tau < 1.0 && p.alive) {
      const Stencil here = locate(grid, p.x);
      const RealArray& v0 = g0.velocity(p.sector);
      const RealArray& v1 = g1.velocity(p.sector);
      const double v_start = vscale * sample_at(v0, v1, here, tau);
      double h = 1.0 - tau;
      if (reach > 0.0 && std::abs(v_start) * h * dt > reach) {
        h = std::max(reach / (std::abs(v_start) * dt), min_h);
        if (tau + h > 1.0 - 1e-12) h = 1.0 - tau;
      }
      const double rate = sample_at(g0.rate(p.sector), g1.rate(p.sector), here, tau + 0.5 * h);
      if (rate > 0.0 && rng.uniform() < -std::expm1(-rate * h * dt)) {
        p.sector = other(p.sector);
        ++diag.jumps;
      } else {
        const Stencil half = locate(grid, p.x + 0.5 * h * dt * v_start);
        p.x += h * dt * vscale * sample_at(v0, v1, half, tau + 0.5 * h);
      }
      tau += h;
      if (p.x < lo || p.x > hi) {
        p.alive = false;
        ++diag.left_domain;
        break;
      }
      if (p.sector == Sector::Aux && p.x < 0.0) {
        p.x = -p.x;
        ++diag.wall_crossings;
      }
    }
    if (!p.alive) continue;
    const Stencil now = locate(grid, p.x);
    const MaskArray& occ = g1.occupied(p.sector);
    if (!occ(now.i) && !occ(now.i + 1)) ++diag.masked_entries;
  }
}

}  // namespace

void advance(Ensemble& ensemble, const GuidanceField& at_t, const GuidanceField& at_t_dt, double dt,
             std::uint64_t step_index, const AdvanceOptions& opts) {
  if (!(at_t.grid == at_t_dt.grid)) throw InputError("guidance snapshots use different grids");
  const std::size_t total = ensemble.particles.size();
  const std::size_t workers = std::max<std::size_t>(1, std::min(opts.workers, total / 1024 + 1));
  std::vector<EnsembleDiagnostics> partial(workers);
  std::span<Particle> all(ensemble.particles);
  if (workers == 1) {
    advance_range(all, at_t, at_t_dt, dt, ensemble.seed, step_index, opts, partial[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(total, w * chunk);
      const std::size_t len = std::min(total, begin + chunk) - begin;
      pool.emplace_back([&, w, begin, len] {
        advance_range(all.subspan(begin, len), at_t, at_t_dt, dt, ensemble.seed, step_index, opts, partial[w]);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& d : partial) {
    ensemble.diagnostics.jumps += d.jumps;
    ensemble.diagnostics.masked_entries += d.masked_entries;
    ensemble.diagnostics.wall_crossings += d.wall_crossings;
    ensemble.diagnostics.left_domain += d.left_domain;
  }
}

ContinuityResidual continuity_residual(const FieldPair& field, const PotentialProfile& potential, double mass,
                                       double dt_probe) {
  const FieldPair next = step(field, potential, mass, dt_probe);
  const Grid& grid = field.grid;
  const Eigen::Index n = grid.n();
  const double dx = grid.dx();

  struct Terms {
    RealArray flux_div_m, flux_div_a, source_m;
  };
  const auto terms = [&](const FieldPair& f) {
    // Floor 0: every node with nonzero density carries its rate.
    const GuidanceField g = guidance(f, potential, mass, 0.0);
    const RealArray j_m = g.v_m * f.density_main();
    const RealArray j_a = g.v_a * f.density_aux();
    Terms t{RealArray::Zero(n), RealArray::Zero(n), RealArray::Zero(n)};
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      t.flux_div_m(i) = (j_m(i + 1) - j_m(i - 1)) / (2.0 * dx);
      t.flux_div_a(i) = (j_a(i + 1) - j_a(i - 1)) / (2.0 * dx);
    }
    t.source_m = g.sigma_a * f.density_aux() - g.sigma_m * f.density_main();
    return t;
  };
  const Terms before = terms(field);
  const Terms after = terms(next);

  ContinuityResidual r{RealArray::Zero(n), RealArray::Zero(n), RealArray::Zero(n), RealArray::Zero(n)};
  const RealArray dt_m = (next.density_main() - field.density_main()) / dt_probe;
  const RealArray dt_a = (next.density_aux() - field.density_aux()) / dt_probe;
  const RealArray div_m = 0.5 * (before.flux_div_m + after.flux_div_m);
  const RealArray div_a = 0.5 * (before.flux_div_a + after.flux_div_a);
  const RealArray src_m = 0.5 * (before.source_m + after.source_m);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    r.res_m(i) = dt_m(i) + div_m(i) - src_m(i);
    r.res_a(i) = dt_a(i) + div_a(i) + src_m(i);
    r.scale_m(i) = std::max({std::abs(dt_m(i)), std::abs(div_m(i)), std::abs(src_m(i))});
    r.scale_a(i) = std::max({std::abs(dt_a(i)), std::abs(div_a(i)), std::abs(src_m(i))});
  }
  return r;
}

double histogram_distance(const Ensemble& ensemble, const FieldPair& field, std::size_t bins) {
  if (bins == 0) throw InputError("histogram needs at least one bin");
  const Grid& grid = field.grid;
  const double lo = grid.x(0);
  const double width = (grid.x(grid.n() - 1) - lo) / static_cast<double>(bins);
  const auto bin_of = [&](double x) {
    const auto b = static_cast<long long>(std::floor((x - lo) / width));
    return static_cast<std::size_t>(std::clamp<long long>(b, 0, static_cast<long long>(bins) - 1));
  };

  std::vector<double> born(2 * bins, 0.0);
  for (Eigen::Index i = 0; i < grid.n(); ++i) {
    const std::size_t b = bin_of(grid.x(i));
    born[b] += std::norm(field.psi_m(i));
    born[bins + b] += std::norm(field.psi_a(i));
  }
  double born_total = 0.0;
  for (double w : born) born_total += w;

  std::vector<double> counts(2 * bins, 0.0);
  double alive = 0.0;
  for (const Particle& p : ensemble.particles) {
    if (!p.alive) continue;
    counts[(p.sector == Sector::Main ? 0 : bins) + bin_of(p.x)] += 1.0;
    alive += 1.0;
  }
  if (!(born_total > 0.0) || !(alive > 0.0)) return 1.0;

  double tv = 0.0;
  for (std::size_t b = 0; b < 2 * bins; ++b) tv += std::abs(counts[b] / alive - born[b] / born_total);
  return 0.5 * tv;
}

DwellTracker::DwellTracker(const Ensemble& ensemble, double t0) : t_last_(t0) { observe(ensemble, t0); }

DwellTracker::State& DwellTracker::state_for(std::uint64_t id) {
  if (id >= states_.size()) states_.resize(id + 1);
  State& s = states_[id];
  s.dwell.id = id;
  return s;
}

void DwellTracker::observe(std::uint64_t id, double x, double t) {
  State& s = state_for(id);
  const bool inside = x >= 0.0;
  if (!s.seen) {
    s.seen = true;
    s.inside = inside;
    s.since = t;
    if (inside) {
      s.dwell.entered = true;
      s.dwell.first_entry = t;
      s.dwell.entries = 1;
    }
  } else if (inside != s.inside) {
    if (inside) {
      if (!s.dwell.entered) s.dwell.first_entry = t;
      s.dwell.entered = true;
      ++s.dwell.entries;
    } else {
      s.dwell.residence += t - s.since;
      s.dwell.last_exit = t;
    }
    s.inside = inside;
    s.since = t;
  }
  t_last_ = std::max(t_last_, t);
}

void DwellTracker::observe(const Ensemble& ensemble, double t) {
  for (const Particle& p : ensemble.particles) {
    if (p.alive) observe(p.id, p.x, t);
  }
}

DwellStatistics DwellTracker::finish() const {
  DwellStatistics out;
  std::size_t seen = 0, never = 0, trapped = 0, entered = 0;
  double residence_sum = 0.0;
  for (const State& s : states_) {
    if (!s.seen) continue;
    ParticleDwell d = s.dwell;
    if (s.inside) {
      d.inside_at_end = true;
      d.residence += t_last_ - s.since;
      ++trapped;
    }
    ++seen;
    if (d.entered) {
      ++entered;
      residence_sum += d.residence;
    } else {
      ++never;
    }
    out.particles.push_back(d);
  }
  if (seen > 0) {
    out.fraction_never_entered = static_cast<double>(never) / static_cast<double>(seen);
    out.fraction_trapped = static_cast<double>(trapped) / static_cast<double>(seen);
    out.fraction_entered = static_cast<double>(entered) / static_cast<double>(seen);
  }
  if (entered > 0) out.mean_residence = residence_sum / static_cast<double>(entered);
  return out;
}

DwellStatistics dwell_statistics(std::span<const TrajectorySample> trajectories) {
  std::vector<TrajectorySample> sorted(trajectories.begin(), trajectories.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const TrajectorySample& a, const TrajectorySample& b) {
    return a.t < b.t || (a.t == b.t && a.id < b.id);
  });
  DwellTracker tracker;
  for (const auto& s : sorted) tracker.observe(s.id, s.x, s.t);
  return tracker.finish();
}

BohmianRunResult run_bohmian(const FieldPair& initial, const PotentialProfile& potential, double mass,
                             const BohmianRunConfig& config, const Ensemble* ensemble,
                             const std::vector<SnapshotObserver>& observers) {
  if (config.cadence == 0) throw InputError("cadence must be at least 1 step");
  BohmianRunResult result{EvolveResult{initial, 0, 0.0, 0.0, {}},
                          ensemble ? *ensemble
                                   : sample_ensemble(initial, config.count, config.seed, config.floor_fraction),
                          {},
                          {},
                          {}};
  Ensemble& ens = result.ensemble;
  DwellTracker tracker(ens, initial.t);

  const auto log_trajectories = [&](double t) {
    const std::size_t limit = config.trajectory_particles == 0
                                  ? ens.particles.size()
                                  : std::min(config.trajectory_particles, ens.particles.size());
    for (std::size_t i = 0; i < limit; ++i) {
      const Particle& p = ens.particles[i];
      if (p.alive) result.trajectories.push_back({t, p.id, p.sector, p.x});
    }
  };

  GuidanceField previous = guidance(initial, potential, mass, config.floor_fraction);
  result.distances.push_back({0, initial.t, histogram_distance(ens, initial, config.bins)});
  if (config.trajectory_stride > 0) log_trajectories(initial.t);

  EvolveConfig ecfg = config.evolve;
  ecfg.snapshot_stride = 1;
  std::vector<SnapshotObserver> all_observers;
  all_observers.push_back([&](const FieldPair& f, std::size_t s) {
    if (s == 0) return;
    GuidanceField current = guidance(f, potential, mass, config.floor_fraction);
    advance(ens, previous, current, config.evolve.dt, s, config.advance);
    previous = std::move(current);
    tracker.observe(ens, f.t);
    if (s % config.cadence == 0) result.distances.push_back({s, f.t, histogram_distance(ens, f, config.bins)});
    if (config.trajectory_stride > 0 && s % config.trajectory_stride == 0) log_trajectories(f.t);
  });
  const std::size_t user_stride = std::max<std::size_t>(1, config.evolve.snapshot_stride);
  for (const auto& obs : observers) {
    all_observers.push_back([&obs, user_stride](const FieldPair& f, std::size_t s) {
      if (s % user_stride == 0) obs(f, s);
    });
  }
  result.tdse = evolve(initial, potential, mass, ecfg, all_observers);
  if (result.distances.back().step != result.tdse.steps) {
    result.distances.push_back(
        {result.tdse.steps, result.tdse.final_state.t, histogram_distance(ens, result.tdse.final_state, config.bins)});
  }
  result.dwell = tracker.finish();
  return result;
}

std::vector<DistanceSample> equivariance_check(const FieldPair& initial, const PotentialProfile& potential,
                                               double mass, const Ensemble& ensemble,
                                               const BohmianRunConfig& config) {
  return run_bohmian(initial, potential, mass, config, &ensemble).distances;
}

}  // namespace cwave
