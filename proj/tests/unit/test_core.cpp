#include "cwave/core.hpp"

#include <doctest.h>

#include <cmath>

using namespace cwave;

TEST_CASE("physical parameters") {
  const PhysicalParams p = PhysicalParams::reference();
  CHECK(p.m == 0.0659);
  CHECK(p.V0 == 817e9);
  CHECK(p.J0 == 40e9);
  CHECK_THROWS_AS(PhysicalParams(0.0, 1.0, 1.0), InputError);
  CHECK_THROWS_AS(PhysicalParams(1.0, -1.0, 1.0), InputError);
  CHECK_THROWS_AS(PhysicalParams(1.0, 1.0, -1.0), InputError);
  CHECK_THROWS_AS(PhysicalParams(1.0, 1.0, NAN), InputError);
  // Uncoupled limit is a valid configuration.
  CHECK_NOTHROW(PhysicalParams(0.0659, 817e9, 0.0));
}

TEST_CASE("energy spec") {
  const PhysicalParams p;
  const EnergySpec a = energy_spec(p, 877e9);
  CHECK(a.delta == doctest::Approx(100e9).epsilon(1e-15));
  CHECK(a.regime == Regime::Allowed);
  const EnergySpec f = energy_spec(p, 677e9);
  CHECK(f.delta == doctest::Approx(-100e9).epsilon(1e-15));
  CHECK(f.regime == Regime::Forbidden);
  CHECK(f.delta == f.E - p.V0 + p.J0);
  CHECK_THROWS_AS(energy_spec(p, p.V0 - p.J0), InputError);
  CHECK_THROWS_AS(energy_spec(p, -1.0), InputError);
  CHECK_THROWS_AS(energy_spec_from_delta(p, 0.0), InputError);

  const EnergySpec d = energy_spec_from_delta(p, -50e9);
  CHECK(d.delta == -50e9);
  CHECK(d.E == doctest::Approx(727e9));
  CHECK(to_string(d.regime) == "forbidden");
}

TEST_CASE("grid") {
  const Grid g(-1.0, 2.0, 31);
  CHECK(g.n() == 31);
  CHECK(g.dx() == doctest::Approx(0.1));
  CHECK(g.origin() == 10);
  CHECK(g.x(g.origin()) == 0.0);
  CHECK(g.x(0) == doctest::Approx(-1.0));
  CHECK(g.x(30) == doctest::Approx(2.0));
  CHECK(g.nearest(0.04) == 10);
  CHECK(g.nearest(-5.0) == 0);
  CHECK(g.nearest(5.0) == 30);
  CHECK(g.coordinates().size() == 31);

  CHECK_THROWS_AS(Grid(-1.0, 1.0, 2), InputError);
  CHECK_THROWS_AS(Grid(1.0, -1.0, 5), InputError);
  // 0 falls between nodes.
  CHECK_THROWS_AS(Grid(-1.0, 2.0, 5), InputError);

  const Grid s = Grid::with_spacing(-1.05e-4, 2.02e-4, 1e-5);
  CHECK(s.x(s.origin()) == 0.0);
  CHECK(s.x_min() <= -1.05e-4);
  CHECK(s.x_max() >= 2.02e-4);
  CHECK(s.dx() == doctest::Approx(1e-5));
}

TEST_CASE("field pair") {
  const Grid g(-1.0, 1.0, 21);
  FieldPair f(g);
  CHECK(f.psi_m.size() == 21);
  CHECK(f.norm() == 0.0);
  f.psi_m.setConstant(1.0);
  f.psi_a.setConstant(Complex(0.0, 1.0));
  CHECK_THROWS_AS(f.check_invariants(), InputError);
  f.enforce_wall();
  CHECK_NOTHROW(f.check_invariants());
  for (Eigen::Index i = 0; i <= g.origin(); ++i) CHECK(f.psi_a(i) == Complex(0.0));
  CHECK(f.psi_a(g.origin() + 1) == Complex(0.0, 1.0));
  CHECK(f.norm() == doctest::Approx((21 + 10) * 0.1));
  CHECK(&f.component(Sector::Aux) == &f.psi_a);
  CHECK(other(Sector::Main) == Sector::Aux);
}

TEST_CASE("build potential") {
  const PhysicalParams p;
  const Grid g = Grid::with_spacing(-2e-5, 2e-5, 1e-5);
  const PotentialProfile v = build_potential(p, g);
  const Eigen::Index left = g.nearest(-1e-5);
  CHECK(v.v_m(left) == 0.0);
  CHECK(v.v_i(left) == 0.0);
  CHECK(v.wall_mask(left));
  CHECK(std::isinf(v.v_a(left)));
  const Eigen::Index o = g.origin();
  CHECK(v.v_m(o) == 777e9);
  CHECK(v.v_a(o) == 777e9);
  CHECK(v.v_i(o) == 40e9);
  // psi_a(0) is pinned to the hard-wall value.
  CHECK(v.wall_mask(o));
  CHECK_FALSE(v.wall_mask(o + 1));
  CHECK(v.max_abs() == 777e9);

  for (Eigen::Index i = 0; i < g.n(); ++i) {
    if (g.x(i) < 0.0) {
      CHECK(v.v_m(i) == 0.0);
      CHECK(v.v_i(i) == 0.0);
    } else {
      CHECK(v.v_m(i) == p.V0 - p.J0);
      CHECK(v.v_a(i) == p.V0 - p.J0);
      CHECK(v.v_i(i) == p.J0);
    }
  }

  const PotentialProfile again = build_potential(p, g);
  CHECK((again.v_m == v.v_m).all());
  CHECK((again.v_i == v.v_i).all());
  CHECK((again.wall_mask == v.wall_mask).all());

  const PotentialProfile off = build_potential(PhysicalParams(0.0659, 817e9, 0.0), g);
  CHECK((off.v_i == 0.0).all());
}
