#ifndef CWAVE_CORE_HPP
#define CWAVE_CORE_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace cwave {

using Complex = std::complex<double>;
using RealArray = Eigen::ArrayXd;
using ComplexArray = Eigen::ArrayXcd;
using MaskArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

// Bad caller input or violated precondition. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A run that started correctly but could not complete (edge contamination,
// missing plateau, singular solve). The CLI maps this to exit code 1.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Physical constants of the coupled-waveguide model in hbar = 1 units.
// m is in s/m^2, V0 and J0 are in 1/s. J0 == 0 is accepted as the
// uncoupled limit.
struct PhysicalParams {
  double m = 0.0659;
  double V0 = 817e9;
  double J0 = 40e9;

  PhysicalParams() = default;
  PhysicalParams(double mass, double step, double coupling);

  // Parameters reported for the photonic cavity experiment.
  static PhysicalParams reference() { return {}; }

  void validate() const;
};

enum class Regime { Allowed, Forbidden };

std::string to_string(Regime r);

struct EnergySpec {
  double E = 0.0;
  double delta = 0.0;  // E - V0 + J0
  Regime regime = Regime::Allowed;
};

// Builds the energy record; rejects the crossover delta == 0 (within 1e-12 V0).
EnergySpec energy_spec(const PhysicalParams& params, double E);
// Convenience inverse: the energy that produces the requested detuning.
EnergySpec energy_spec_from_delta(const PhysicalParams& params, double delta);

// Uniform grid with the step location x = 0 on a node. Node coordinates are
// generated as (i - origin) * dx so that node `origin` is exactly 0.0.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n);

  // Snaps the bounds outward to multiples of dx so that 0 is a node.
  static Grid with_spacing(double x_min, double x_max, double dx);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double dx() const { return dx_; }
  std::size_t size() const { return n_; }
  Eigen::Index n() const { return static_cast<Eigen::Index>(n_); }
  // Index of the node at x = 0.
  Eigen::Index origin() const { return origin_; }

  double x(Eigen::Index i) const { return static_cast<double>(i - origin_) * dx_; }
  RealArray coordinates() const;
  // Nearest node to position x, clamped to the grid.
  Eigen::Index nearest(double x) const;

  bool operator==(const Grid& o) const {
    return n_ == o.n_ && origin_ == o.origin_ && dx_ == o.dx_;
  }

 private:
  double x_min_;
  double x_max_;
  double dx_;
  std::size_t n_;
  Eigen::Index origin_;
};

enum class Sector { Main, Aux };

inline Sector other(Sector s) { return s == Sector::Main ? Sector::Aux : Sector::Main; }
std::string to_string(Sector s);

// Two-component wavefunction (psi_m, psi_a) on a grid at time t.
struct FieldPair {
  Grid grid;
  ComplexArray psi_m;
  ComplexArray psi_a;
  double t = 0.0;

  explicit FieldPair(const Grid& g, double time = 0.0)
      : grid(g), psi_m(ComplexArray::Zero(g.n())), psi_a(ComplexArray::Zero(g.n())), t(time) {}

  const ComplexArray& component(Sector s) const { return s == Sector::Main ? psi_m : psi_a; }
  ComplexArray& component(Sector s) { return s == Sector::Main ? psi_m : psi_a; }

  RealArray density_main() const { return psi_m.abs2(); }
  RealArray density_aux() const { return psi_a.abs2(); }
  RealArray density() const { return psi_m.abs2() + psi_a.abs2(); }

  // Discrete norm: sum of (|psi_m|^2 + |psi_a|^2) dx.
  double norm() const { return density().sum() * grid.dx(); }

  // Zeroes psi_a on the hard-wall nodes (x <= 0).
  void enforce_wall();
  void check_invariants() const;
};

// Discretized potentials. The node at x = 0 belongs to the step branch for
// v_m, v_a, v_i; wall_mask marks nodes where psi_a is held at zero, which is
// every x < 0 node plus x = 0 itself (continuity with the hard wall).
struct PotentialProfile {
  Grid grid;
  RealArray v_m;
  RealArray v_a;
  RealArray v_i;
  MaskArray wall_mask;

  double max_abs() const;
};

PotentialProfile build_potential(const PhysicalParams& params, const Grid& grid);

}  // namespace cwave

#endif  // CWAVE_CORE_HPP
