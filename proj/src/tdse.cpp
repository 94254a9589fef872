#include "cwave/tdse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cwave {

namespace {

constexpr Complex kI(0.0, 1.0);

void check_packet(const Grid& grid, const PacketSpec& spec) {
  if (!(spec.sigma > 0.0)) throw InputError("packet width sigma must be positive");
  if (!(spec.k > 0.0)) throw InputError("packet wavenumber k must be positive (rightward)");
  if (!(spec.plateau >= 0.0)) throw InputError("packet plateau length must be non-negative");
  if (spec.sigma * spec.k < spec.min_sigma_k) {
    std::ostringstream msg;
    msg << "packet sigma*k = " << spec.sigma * spec.k << " is below " << spec.min_sigma_k
        << "; the packet must be wide relative to its wavelength";
    throw InputError(msg.str());
  }
  if (!(spec.x0 + 0.5 * spec.plateau < 0.0)) {
    throw InputError("packet must start entirely in x < 0");
  }
  if (spec.x0 <= grid.x_min() || spec.x0 >= grid.x_max()) {
    throw InputError("packet center lies outside the grid");
  }
}

// Initial support must be negligible on the step region and at the walls.
void check_tails(const FieldPair& f) {
  const RealArray rho = f.density();
  const double peak = rho.maxCoeff();
  const Eigen::Index o = f.grid.origin();
  const double right = rho.tail(f.grid.n() - o).maxCoeff();
  const double edge = std::max(rho(0), rho(f.grid.n() - 1));
  if (right > 1e-12 * peak) {
    throw InputError("packet tail reaches x >= 0 (density above 1e-12 of peak); move x0 left");
  }
  if (edge > 1e-12 * peak) {
    throw InputError("packet tail reaches the domain edge (density above 1e-12 of peak)");
  }
}

void normalize(FieldPair& f) {
  const double norm = f.norm();
  if (!(norm > 0.0)) throw InputError("packet has zero norm on this grid");
  f.psi_m /= std::sqrt(norm);
}

}  // namespace

FieldPair gaussian_packet(const Grid& grid, const PacketSpec& spec) {
  check_packet(grid, spec);
  FieldPair f(grid);
  for (Eigen::Index i = 0; i < grid.n(); ++i) {
    const double u = grid.x(i) - spec.x0;
    f.psi_m(i) = std::exp(-u * u / (4.0 * spec.sigma * spec.sigma)) * std::exp(kI * (spec.k * grid.x(i)));
  }
  normalize(f);
  check_tails(f);
  return f;
}

FieldPair plateau_packet(const Grid& grid, const PacketSpec& spec) {
  check_packet(grid, spec);
  FieldPair f(grid);
  const double lo = spec.x0 - 0.5 * spec.plateau;
  const double hi = spec.x0 + 0.5 * spec.plateau;
  const double scale = 2.0 * spec.sigma;
  for (Eigen::Index i = 0; i < grid.n(); ++i) {
    const double x = grid.x(i);
    // erfc forms keep relative accuracy far out in the tails.
    const double env = x >= spec.x0
                           ? 0.5 * (std::erfc((x - hi) / scale) - std::erfc((x - lo) / scale))
                           : 0.5 * (std::erfc((lo - x) / scale) - std::erfc((hi - x) / scale));
    f.psi_m(i) = env * std::exp(kI * (spec.k * x));
  }
  normalize(f);
  check_tails(f);
  return f;
}

FieldPair wave_packet(const Grid& grid, const PacketSpec& spec) {
  return spec.plateau > 0.0 ? plateau_packet(grid, spec) : gaussian_packet(grid, spec);
}

double packet_max_wavenumber(const PacketSpec& spec) { return spec.k + 4.0 / spec.sigma; }

double default_time_step(const PotentialProfile& potential, double mass, const PacketSpec& spec) {
  const double k_max = packet_max_wavenumber(spec);
  const double scale = std::max(potential.max_abs(), k_max * k_max / (2.0 * mass));
  return 0.2 / scale;
}

CrankNicolson::CrankNicolson(const PotentialProfile& potential, double mass, double dt)
    : grid_(potential.grid), dt_(dt) {
  if (!(dt > 0.0)) throw InputError("time step must be positive");
  if (!(mass > 0.0)) throw InputError("mass must be positive");
  const Eigen::Index n = grid_.n();
  if (potential.v_m.size() != n || potential.wall_mask.size() != n) {
    throw InputError("potential does not match its grid");
  }

  clamp_m_ = MaskArray::Constant(n, false);
  clamp_a_ = potential.wall_mask;
  clamp_m_(0) = clamp_m_(n - 1) = true;
  clamp_a_(0) = clamp_a_(n - 1) = true;

  using Block = BlockTridiagonalLU<Complex>::Block;
  const double kinetic = 1.0 / (mass * grid_.dx() * grid_.dx());
  const Complex alpha = kI * (0.5 * dt);
  std::vector<Block> lower(n), diag(n), upper(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Block d;
    d(0, 0) = 1.0 + alpha * (kinetic + potential.v_m(i));
    d(0, 1) = alpha * potential.v_i(i);
    d(1, 0) = alpha * potential.v_i(i);
    d(1, 1) = clamp_a_(i) ? Complex(1.0) : 1.0 + alpha * (kinetic + potential.v_a(i));
    Block off = Block::Zero();
    off(0, 0) = off(1, 1) = -0.5 * alpha * kinetic;
    Block lo = off, up = off;
    // Clamped unknowns: identity row, no coupling in or out.
    if (clamp_m_(i)) {
      d.row(0) << 1.0, 0.0;
      d(1, 0) = 0.0;
      lo.row(0).setZero();
      up.row(0).setZero();
    }
    if (clamp_a_(i)) {
      d(1, 0) = 0.0;
      d(0, 1) = 0.0;
      d(1, 1) = 1.0;
      lo.row(1).setZero();
      up.row(1).setZero();
    }
    if (i > 0 && clamp_m_(i - 1)) lo(0, 0) = 0.0;
    if (i > 0 && clamp_a_(i - 1)) lo(1, 1) = 0.0;
    if (i + 1 < n && clamp_m_(i + 1)) up(0, 0) = 0.0;
    if (i + 1 < n && clamp_a_(i + 1)) up(1, 1) = 0.0;
    lower[i] = lo;
    diag[i] = d;
    upper[i] = up;
  }
  try {
    lu_.factorize(lower, diag, upper);
  } catch (const std::runtime_error& e) {
    throw RunError(std::string("implicit-midpoint factorization failed: ") + e.what());
  }
}

void CrankNicolson::advance(FieldPair& field) const {
  if (!(field.grid == grid_)) throw InputError("field and propagator grids differ");
  for (Eigen::Index i = 0; i < grid_.n(); ++i) {
    if (clamp_m_(i)) field.psi_m(i) = 0.0;
    if (clamp_a_(i)) field.psi_a(i) = 0.0;
  }
  // (1 + iaH) psi' = (1 - iaH) psi  is  psi' = 2 chi - psi  with  (1 + iaH) chi = psi.
  ComplexArray chi_m = field.psi_m;
  ComplexArray chi_a = field.psi_a;
  lu_.solve(chi_m, chi_a);
  field.psi_m = 2.0 * chi_m - field.psi_m;
  field.psi_a = 2.0 * chi_a - field.psi_a;
  field.t += dt_;
}

FieldPair step(const FieldPair& field, const PotentialProfile& potential, double mass, double dt) {
  FieldPair next = field;
  CrankNicolson(potential, mass, dt).advance(next);
  return next;
}

double edge_density_fraction(const FieldPair& field, std::size_t width) {
  const auto w = std::min<Eigen::Index>(static_cast<Eigen::Index>(width), field.grid.n() / 2);
  const RealArray rho = field.density();
  const double total = rho.sum();
  if (!(total > 0.0)) return 0.0;
  return (rho.head(w).sum() + rho.tail(w).sum()) / total;
}

EvolveResult evolve(FieldPair field, const PotentialProfile& potential, double mass,
                    const EvolveConfig& config, const std::vector<SnapshotObserver>& observers) {
  if (!(config.t_end >= 0.0)) throw InputError("t_end must be non-negative");
  if (config.snapshot_stride == 0) throw InputError("snapshot_stride must be at least 1");
  field.check_invariants();

  EvolveResult result{field, 0, field.norm(), 0.0, {}};
  const double e_ref = config.energy_reference;
  const double t0 = field.t;
  // The propagated field carries an extra factor exp(i e_ref (t - t0)).
  const auto to_lab = [&](FieldPair& f) {
    if (e_ref == 0.0) return;
    const Complex phase = std::polar(1.0, -e_ref * (f.t - t0));
    f.psi_m *= phase;
    f.psi_a *= phase;
  };
  const auto notify = [&](const FieldPair& f, std::size_t s) {
    if (observers.empty()) return;
    if (e_ref == 0.0) {
      for (const auto& obs : observers) obs(f, s);
      return;
    }
    FieldPair lab = f;
    to_lab(lab);
    for (const auto& obs : observers) obs(lab, s);
  };
  notify(field, 0);
  if (config.t_end == 0.0) {
    result.final_norm = result.initial_norm;
    return result;
  }

  if (config.dt * potential.max_abs() > 0.5) {
    std::ostringstream msg;
    msg << "dt*max|V| = " << config.dt * potential.max_abs()
        << " exceeds 0.5; phases will be inaccurate (the scheme stays stable)";
    result.warnings.push_back(msg.str());
  }

  PotentialProfile shifted = potential;
  shifted.v_m -= e_ref;
  shifted.v_a -= e_ref;
  const CrankNicolson propagator(shifted, mass, config.dt);
  const auto steps = static_cast<std::size_t>(std::ceil(config.t_end / config.dt - 1e-9));
  const std::size_t width =
      config.edge_width > 0 ? config.edge_width : std::max<std::size_t>(4, field.grid.size() / 100);
  for (std::size_t s = 1; s <= steps; ++s) {
    propagator.advance(field);
    field.t = t0 + static_cast<double>(s) * config.dt;
    const double edge = edge_density_fraction(field, width);
    if (edge > config.edge_tolerance) {
      std::ostringstream msg;
      msg << "edge contamination at t=" << field.t << " (step " << s << "): " << edge
          << " of the norm within " << width << " nodes of a wall; enlarge the domain";
      throw RunError(msg.str());
    }
    if (s % config.snapshot_stride == 0 || s == steps) notify(field, s);
  }
  result.steps = steps;
  result.final_norm = field.norm();
  to_lab(field);
  result.final_state = std::move(field);
  return result;
}

RealArray probability_current(const FieldPair& field, Sector sector, double mass) {
  return probability_current(field.component(sector), field.grid.dx(), mass);
}

double stored_number(const FieldPair& field) {
  const Eigen::Index o = field.grid.origin();
  const Eigen::Index len = field.grid.n() - o;
  return (field.psi_m.tail(len).abs2().sum() + field.psi_a.tail(len).abs2().sum()) * field.grid.dx();
}

double left_norm(const FieldPair& field) {
  const Eigen::Index o = field.grid.origin();
  return (field.psi_m.head(o).abs2().sum() + field.psi_a.head(o).abs2().sum()) * field.grid.dx();
}

QuasiStationaryPa quasi_stationary_pa(std::span<const FieldPair> snapshots, const TimeWindow& window,
                                      double max_drift, double density_floor) {
  if (snapshots.empty()) throw InputError("quasi-stationary p_a needs at least one snapshot");
  if (window.t_end < window.t_begin) throw InputError("window end precedes its start");

  std::vector<const FieldPair*> used;
  if (window.t_end == window.t_begin) {
    const FieldPair* best = &snapshots.front();
    for (const auto& s : snapshots) {
      if (std::abs(s.t - window.t_begin) < std::abs(best->t - window.t_begin)) best = &s;
    }
    used.push_back(best);
  } else {
    const double slack = 1e-9 * (window.t_end - window.t_begin);
    for (const auto& s : snapshots) {
      if (s.t >= window.t_begin - slack && s.t <= window.t_end + slack) used.push_back(&s);
    }
  }
  if (used.empty()) throw RunError("no snapshots fall inside the quasi-stationary window");

  double n_min = stored_number(*used.front());
  double n_max = n_min;
  double n_sum = 0.0;
  for (const auto* s : used) {
    const double n = stored_number(*s);
    n_min = std::min(n_min, n);
    n_max = std::max(n_max, n);
    n_sum += n;
  }
  const double mean = n_sum / static_cast<double>(used.size());
  QuasiStationaryPa out;
  out.snapshots_used = used.size();
  out.stored_drift = mean > 0.0 ? (n_max - n_min) / mean : 0.0;
  if (!(mean > 0.0) || out.stored_drift >= max_drift) {
    std::ostringstream msg;
    msg << "no plateau: stored number drifts by " << out.stored_drift << " over the window [" << window.t_begin
        << ", " << window.t_end << "] (limit " << max_drift << ")";
    throw RunError(msg.str());
  }

  const Eigen::Index n = used.front()->grid.n();
  RealArray pa_sum = RealArray::Zero(n);
  RealArray rho_sum = RealArray::Zero(n);
  for (const auto* s : used) {
    const RealArray aux = s->density_aux();
    const RealArray total = s->density();
    rho_sum += total;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (total(i) > 0.0) pa_sum(i) += aux(i) / total(i);
    }
  }
  const double count = static_cast<double>(used.size());
  const double floor = density_floor * rho_sum.maxCoeff();
  out.pa = pa_sum / count;
  out.valid = rho_sum > floor;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!out.valid(i)) out.pa(i) = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace cwave
