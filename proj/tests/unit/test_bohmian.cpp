#include "cwave/analytic.hpp"
#include "cwave/bohmian.hpp"

#include <doctest.h>

#include <cmath>

using namespace cwave;

namespace {

const PhysicalParams kParams;

FieldPair analytic(double delta, const Grid& g) {
  return stationary_state(kParams, energy_spec_from_delta(kParams, delta), g, 1.0);
}

GuidanceField uniform_guidance(const Grid& g, double v, double rate) {
  GuidanceField f{g};
  const Eigen::Index n = g.n();
  f.v_m = f.v_a = RealArray::Constant(n, v);
  f.sigma_m = f.sigma_a = RealArray::Constant(n, rate);
  f.occupied_m = f.occupied_a = MaskArray::Constant(n, true);
  return f;
}

}  // namespace

TEST_CASE("guidance on the Forbidden stationary state is frozen") {
  const Grid g = Grid::with_spacing(-5e-5, 1e-4, 1e-7);
  const FieldPair f = analytic(-100e9, g);
  const GuidanceField gf = guidance(f, build_potential(kParams, g), kParams.m);
  const Eigen::Index o = g.origin();
  const Eigen::Index tail = g.n() - o;
  CHECK((gf.v_m.tail(tail) == 0.0).all());
  CHECK((gf.v_a.tail(tail) == 0.0).all());
  CHECK((gf.sigma_m.tail(tail) == 0.0).all());
  CHECK((gf.sigma_a.tail(tail) == 0.0).all());
  // Standing wave on the left carries no net current either.
  CHECK(gf.v_m.head(o).abs().maxCoeff() < 1e-6 * 3e5 / kParams.m);
}

TEST_CASE("guidance on the Allowed stationary state") {
  const Grid g = Grid::with_spacing(-5e-5, 1e-4, 1e-8);
  const EnergySpec spec = energy_spec_from_delta(kParams, 100e9);
  const Wavenumbers k = wavenumbers(kParams, spec);
  const FieldPair f = stationary_state(k, spec.regime, g, 1.0);
  const PotentialProfile v = build_potential(kParams, g);
  const GuidanceField gf = guidance(f, v, kParams.m);
  const double speed = k.k2 / kParams.m;
  double worst_v = 0.0, worst_rate = 0.0;
  for (Eigen::Index i = g.origin() + 1; i + 1 < g.n(); ++i) {
    worst_v = std::max(worst_v, std::abs(gf.v_m(i) / speed - 1.0));
    if (gf.occupied_a(i)) worst_v = std::max(worst_v, std::abs(gf.v_a(i) / speed - 1.0));
    const double u = k.k1 * g.x(i);
    if (u < M_PI / 2 - 0.01) {
      REQUIRE(gf.sigma_a(i) == 0.0);
      worst_rate = std::max(worst_rate, std::abs(gf.sigma_m(i) / (2.0 * kParams.J0 * std::tan(u)) - 1.0));
    }
  }
  // Central-difference phase gradient: relative error ~ (k2 dx)^2 / 6.
  CHECK(worst_v < 1e-5);
  CHECK(worst_rate < 1e-12);
  CHECK_FALSE(gf.occupied_a(g.origin()));
  CHECK(gf.v_a(g.origin()) == 0.0);
}

TEST_CASE("rate bookkeeping") {
  // Mid-transfer state with arbitrary relative phases.
  const Grid g = Grid::with_spacing(-1e-5, 1e-4, 1e-7);
  const PotentialProfile v = build_potential(kParams, g);
  FieldPair f(g);
  for (Eigen::Index i = 0; i < g.n(); ++i) {
    const double x = g.x(i);
    f.psi_m(i) = std::exp(Complex(-x * x / 1e-9, 3e5 * x));
    f.psi_a(i) = x > 0.0 ? Complex(0.3 * std::sin(7e4 * x), 0.5 * std::cos(2e4 * x)) : Complex(0.0);
  }
  const GuidanceField gf = guidance(f, v, kParams.m, 0.0);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < g.n(); ++i) {
    REQUIRE(gf.sigma_m(i) >= 0.0);
    REQUIRE(gf.sigma_a(i) >= 0.0);
    REQUIRE(gf.sigma_m(i) * gf.sigma_a(i) == 0.0);
    const Complex cross = Complex(0.0, v.v_i(i)) * (std::conj(f.psi_a(i)) * f.psi_m(i) - std::conj(f.psi_m(i)) * f.psi_a(i));
    const double lhs = gf.sigma_a(i) * std::norm(f.psi_a(i)) - gf.sigma_m(i) * std::norm(f.psi_m(i));
    worst = std::max(worst, std::abs(lhs - cross.real()) / (kParams.J0 * (std::norm(f.psi_m(i)) + 1e-300)));
    REQUIRE(std::abs(cross.imag()) < 1e-6 * kParams.J0);
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("sampling") {
  const Grid g = Grid::with_spacing(-2e-3, 1e-4, 1e-6);
  FieldPair f(g);
  const double x0 = -1e-3, s = 1e-4;
  for (Eigen::Index i = 0; i < g.n(); ++i) {
    const double u = g.x(i) - x0;
    f.psi_m(i) = std::exp(-u * u / (4 * s * s));
  }
  f.psi_m /= std::sqrt(f.norm());

  const Ensemble e = sample_ensemble(f, 100000, 42);
  CHECK(e.particles.size() == 100000);
  CHECK(e.count_in(Sector::Main) == 100000);
  double mean = 0.0;
  for (const auto& p : e.particles) mean += p.x;
  mean /= 1e5;
  CHECK(std::abs(mean - x0) < 3.0 * s / std::sqrt(1e5));
  CHECK(histogram_distance(e, f, 100) < 0.01);

  const Ensemble again = sample_ensemble(f, 100000, 42);
  bool same = true;
  for (std::size_t i = 0; i < e.particles.size(); ++i) same = same && e.particles[i].x == again.particles[i].x;
  CHECK(same);
  const Ensemble other_seed = sample_ensemble(f, 10, 43);
  CHECK(other_seed.particles[0].x != e.particles[0].x);
  // Prefix property: a smaller ensemble is the head of a larger one.
  CHECK(sample_ensemble(f, 10, 42).particles[9].x == e.particles[9].x);

  // Nodes under the floor are never sampled.
  for (const auto& p : e.particles) {
    REQUIRE(std::norm(f.psi_m(g.nearest(p.x))) > 0.0);
  }
  CHECK(sample_ensemble(f, 0, 1).particles.empty());
  CHECK_THROWS_AS(sample_ensemble(FieldPair(g), 10, 1), InputError);
}

TEST_CASE("two-sector sampling") {
  const Grid g = Grid::with_spacing(-5e-5, 1e-4, 1e-7);
  const FieldPair f = analytic(100e9, g);
  const Ensemble e = sample_ensemble(f, 50000, 3);
  const double aux_weight = f.density_aux().sum() / f.density().sum();
  const double frac = static_cast<double>(e.count_in(Sector::Aux)) / 5e4;
  CHECK(std::abs(frac - aux_weight) < 4.0 * std::sqrt(aux_weight * (1 - aux_weight) / 5e4));
  for (const auto& p : e.particles) {
    if (p.sector == Sector::Aux) REQUIRE(p.x >= 0.0);
  }
}

TEST_CASE("advance: uniform drift and frozen particles") {
  const Grid g = Grid::with_spacing(-1.0, 1.0, 1e-3);
  const GuidanceField u = uniform_guidance(g, 2.5, 0.0);
  Ensemble e;
  e.seed = 9;
  for (std::uint64_t i = 0; i < 20; ++i) e.particles.push_back({i, i % 2 ? Sector::Aux : Sector::Main, 0.01 * i, true});
  const Ensemble before = e;
  advance(e, u, u, 0.01, 0);
  for (std::size_t i = 0; i < e.particles.size(); ++i) {
    CHECK(e.particles[i].x == doctest::Approx(before.particles[i].x + 0.025).epsilon(1e-14));
    CHECK(e.particles[i].sector == before.particles[i].sector);
  }
  CHECK(e.diagnostics.jumps == 0);

  const GuidanceField frozen = uniform_guidance(g, 0.0, 0.0);
  advance(e, frozen, frozen, 0.01, 1);
  for (std::size_t i = 0; i < e.particles.size(); ++i) {
    CHECK(e.particles[i].x == doctest::Approx(before.particles[i].x + 0.025).epsilon(1e-14));
  }

  // Leaving the domain retires a particle.
  Ensemble edge;
  edge.particles.push_back({0, Sector::Main, 0.999, true});
  advance(edge, u, u, 0.01, 0);
  CHECK_FALSE(edge.particles[0].alive);
  CHECK(edge.diagnostics.left_domain == 1);
}

TEST_CASE("advance: sub-steps follow a linear velocity field") {
  // v = x has the flow x(t) = x0 exp(t).
  const Grid g = Grid::with_spacing(-2.0, 2.0, 1e-3);
  GuidanceField lin = uniform_guidance(g, 0.0, 0.0);
  for (Eigen::Index i = 0; i < g.n(); ++i) lin.v_m(i) = g.x(i);
  const double dt = 0.1, x0 = 0.5;
  const auto moved = [&](double max_cells) {
    Ensemble e;
    e.particles.push_back({0, Sector::Main, x0, true});
    advance(e, lin, lin, dt, 0, {1.0, 1, max_cells});
    return e.particles[0].x;
  };
  const double exact = x0 * std::exp(dt);
  const double single = std::abs(moved(0.0) - exact);
  CHECK(single == doctest::Approx(x0 * dt * dt * dt / 6.0).epsilon(0.05));
  CHECK(std::abs(moved(1.0) - exact) < 1e-3 * single);
}

TEST_CASE("advance: jump statistics") {
  const Grid g = Grid::with_spacing(-1.0, 1.0, 1e-2);
  const double rate = 3.0, dt = 0.1;
  const GuidanceField r = uniform_guidance(g, 0.0, rate);
  Ensemble e;
  e.seed = 5;
  const std::size_t n = 40000;
  for (std::uint64_t i = 0; i < n; ++i) e.particles.push_back({i, Sector::Main, 0.0, true});
  advance(e, r, r, dt, 0);
  const double p = -std::expm1(-rate * dt);
  const double frac = static_cast<double>(e.count_in(Sector::Aux)) / n;
  CHECK(std::abs(frac - p) < 4.0 * std::sqrt(p * (1 - p) / n));
  CHECK(e.diagnostics.jumps == e.count_in(Sector::Aux));
  for (const auto& q : e.particles) REQUIRE(q.x == 0.0);
}

TEST_CASE("advance is independent of the worker count") {
  const Grid g = Grid::with_spacing(-1.0, 1.0, 1e-2);
  GuidanceField a = uniform_guidance(g, 0.3, 2.0);
  GuidanceField b = uniform_guidance(g, 0.5, 1.0);
  for (Eigen::Index i = 0; i < g.n(); ++i) a.v_m(i) += 0.2 * g.x(i);
  Ensemble e1;
  e1.seed = 77;
  for (std::uint64_t i = 0; i < 5000; ++i) e1.particles.push_back({i, Sector::Main, -0.5 + 1e-4 * i, true});
  Ensemble e4 = e1;
  for (std::uint64_t s = 0; s < 20; ++s) {
    advance(e1, a, b, 0.01, s, {1.0, 1});
    advance(e4, a, b, 0.01, s, {1.0, 4});
  }
  bool same = true;
  for (std::size_t i = 0; i < e1.particles.size(); ++i) {
    same = same && e1.particles[i].x == e4.particles[i].x && e1.particles[i].sector == e4.particles[i].sector;
  }
  CHECK(same);
  CHECK(e1.diagnostics.jumps == e4.diagnostics.jumps);
  CHECK_THROWS_AS(advance(e1, a, uniform_guidance(Grid(-1.0, 1.0, 11), 0, 0), 0.01, 0), InputError);
}

TEST_CASE("continuity residual") {
  SUBCASE("uncoupled guides have no source") {
    const PhysicalParams off(0.0659, 817e9, 0.0);
    const Grid g = Grid::with_spacing(-2e-3, 2e-4, 5e-7);
    const FieldPair f = gaussian_packet(g, {-1e-3, 1e-4, 3.2e5});
    const PotentialProfile v = build_potential(off, g);
    const ContinuityResidual r = continuity_residual(f, v, off.m, 1e-14);
    CHECK((r.res_a == 0.0).all());
    const GuidanceField gf = guidance(f, v, off.m);
    CHECK((gf.sigma_m == 0.0).all());
    CHECK(r.res_m.abs().maxCoeff() < 1e-4 * r.scale_m.maxCoeff());
  }
  SUBCASE("stationary state balances flux against sources") {
    const Grid g = Grid::with_spacing(-5e-5, 1e-4, 1e-8);
    const FieldPair f = stationary_state(kParams, energy_spec_from_delta(kParams, 100e9), g, 1.0, {true, 2.0});
    const PotentialProfile v = build_potential(kParams, g);
    const ContinuityResidual r = continuity_residual(f, v, kParams.m, 1e-14);
    // Away from the kink at x = 0 and from the clamped right edge, whose
    // disturbance the implicit step spreads over ~sqrt(dt/m).
    const Eigen::Index first = g.nearest(2e-6);
    const Eigen::Index len = g.nearest(8e-5) - first;
    const RealArray res = r.res_m.segment(first, len);
    const double scale = r.scale_m.segment(first, len).maxCoeff();
    CHECK(res.abs().maxCoeff() < 1e-3 * scale);
    CHECK(r.res_a.segment(first, len).abs().maxCoeff() < 1e-3 * scale);
  }
}

TEST_CASE("histogram distance") {
  const Grid g(-1.0, 1.0, 201);
  FieldPair f(g);
  f.psi_m.setConstant(1.0);
  Ensemble e;
  for (std::uint64_t i = 0; i < 201; ++i) e.particles.push_back({i, Sector::Main, g.x(i), true});
  CHECK(histogram_distance(e, f, 100) < 0.01);
  for (auto& p : e.particles) p.sector = Sector::Aux;
  CHECK(histogram_distance(e, f, 100) == doctest::Approx(1.0));
  CHECK(histogram_distance(Ensemble{}, f, 100) == 1.0);
  CHECK_THROWS_AS(histogram_distance(e, f, 0), InputError);
}

TEST_CASE("dwell statistics") {
  std::vector<TrajectorySample> log;
  // id 0 never enters; id 1 enters at t=1, leaves at t=3; id 2 enters at t=2 and stays.
  for (int t = 0; t <= 4; ++t) {
    log.push_back({double(t), 0, Sector::Main, -1.0});
    log.push_back({double(t), 1, Sector::Main, (t >= 1 && t < 3) ? 0.5 : -0.5});
    log.push_back({double(t), 2, Sector::Aux, t >= 2 ? 0.1 : -0.1});
  }
  std::reverse(log.begin(), log.end());
  const DwellStatistics s = dwell_statistics(log);
  REQUIRE(s.particles.size() == 3);
  CHECK(s.fraction_never_entered == doctest::Approx(1.0 / 3));
  CHECK(s.fraction_trapped == doctest::Approx(1.0 / 3));
  CHECK(s.fraction_entered == doctest::Approx(2.0 / 3));
  CHECK_FALSE(s.particles[0].entered);
  CHECK(s.particles[1].residence == 2.0);
  CHECK(s.particles[1].first_entry == 1.0);
  CHECK(s.particles[1].last_exit == 3.0);
  CHECK(s.particles[1].entries == 1);
  CHECK(s.particles[2].inside_at_end);
  CHECK(s.particles[2].residence == 2.0);
  CHECK(s.mean_residence == 2.0);
  CHECK(dwell_statistics({}).particles.empty());
}
