#ifndef VIRIAL_QBALL_HPP_
#define VIRIAL_QBALL_HPP_

#include <string>
#include <vector>

#include "virial/lattice.hpp"

namespace virial {

// Uniform radial grid [0, r_max] with n intervals (n + 1 nodes).
struct RadialGrid {
  double r_max = 20.0;
  int n = 2000;
  double dr() const { return r_max / n; }
};

// Spherically symmetric stationary profile phi = f(r) e^{i omega t}.
struct RadialProfile {
  std::vector<double> r;
  std::vector<double> f;
  double omega = 0.0;
  double f0 = 0.0;
  PotentialExpr potential;
};

// residual_k = f'' + (2/r) f' + omega^2 f - V'(f^2) f on interior nodes
// (4th-order stencils; even extension at r = 0, where the Laplacian
// regularizes to 3 f''(0)).
std::vector<double> radial_residual(const RadialProfile& profile);

// V = -q1 s ln(q2 s) admits f = A exp(-q1 r^2 / 2) with
// A^2 = exp(2 - omega^2/q1) / q2.
RadialProfile exact_log_qball(double q1, double q2, double omega,
                              const RadialGrid& grid);

class NoSignChange : public std::runtime_error {
 public:
  explicit NoSignChange(const std::string& what) : std::runtime_error(what) {}
};
class NonConvergent : public std::runtime_error {
 public:
  explicit NonConvergent(const std::string& what)
      : std::runtime_error(what) {}
};

struct ShootOptions {
  int node_count = 0;        // requested number of zero crossings
  double decay_tol = 1e-6;   // f(R)/max|f| bound for the emitted profile
  double bracket_rtol = 1e-13;
  double ode_rtol = 1e-12;
  double ode_atol = 1e-14;
  int max_r_doublings = 4;
};

// Integrates f'' + (2/r) f' + omega^2 f - V'(f^2) f = 0 outward from
// f(0) = f0, f'(0) = 0 with an adaptive Dormand-Prince 5(4) scheme and
// bisects f0 between overshoot (too many zero crossings) and undershoot
// (f turns away from the axis).  The grid's r_max doubles when the decay
// window is not reached.  Throws NoSignChange / NonConvergent.
RadialProfile shoot(const PotentialExpr& potential, double omega,
                    double f0_lo, double f0_hi, const RadialGrid& grid,
                    const ShootOptions& opts = {});

// phi(t, x) = f(|x|) e^{i omega t} on the lattice (linear interpolation
// in r, zero beyond the profile), A == 0.  Requires a U(1) group,
// grid.period_t = 2 pi / omega, and n_t >= 16.
ScalarGaugeConfig profile_to_config(const RadialProfile& profile,
                                    const GridSpec& grid,
                                    const GaugeGroup& group,
                                    double decay_tol = 1e-6);

// CSV `r,f` and a JSON sidecar {omega, f0, potential_text, residual_max}.
void write_profile_csv(const std::string& path, const RadialProfile& p);
std::string profile_sidecar_json(const RadialProfile& p);
RadialProfile read_profile_csv(const std::string& csv_path,
                               const std::string& sidecar_path);

}  // namespace virial

#endif  // VIRIAL_QBALL_HPP_
