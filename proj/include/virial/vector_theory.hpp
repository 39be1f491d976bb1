#ifndef VIRIAL_VECTOR_THEORY_HPP_
#define VIRIAL_VECTOR_THEORY_HPP_

#include <complex>
#include <vector>

#include "virial/lattice.hpp"

namespace virial {

// Charged massive vector field W+_mu coupled to the Maxwell field A_mu.
// W- is the complex conjugate of W+ and is never stored.
// w layout: [mu][t][z][y][x]; a layout: [mu][t][z][y][x] (empty => A == 0).
struct VectorConfig {
  GridSpec grid;
  double e_charge = 1.0;
  double mass_m = 1.0;
  std::vector<std::complex<double>> w;
  std::vector<double> a;

  bool a_is_zero() const { return a.empty(); }

  std::size_t w_index(int mu, int t, int z, int y, int x) const {
    const int nx = grid.n_x;
    return (((static_cast<std::size_t>(mu) * grid.n_t + t) * nx + z) * nx +
            y) *
               nx +
           x;
  }
  std::size_t a_index(int mu, int t, int z, int y, int x) const {
    return w_index(mu, t, z, y, x);
  }

  static VectorConfig zeros(const GridSpec& grid, double e_charge,
                            double mass_m, bool with_gauge_field);
  void validate() const;
};

// The six integrals over one period: Pi_W0 = int |W+_{0i}|^2,
// Pi_W1 = int 1/2 |W+_{ij}|^2, V0 = m^2 int |W+_0|^2,
// V1 = m^2 int |W+_i|^2, and the Maxwell pair Pi_A0, Pi_A1.
struct VectorFunctionalSet {
  double piW0 = 0.0;
  double piW1 = 0.0;
  double v0 = 0.0;
  double v1 = 0.0;
  double piA0 = 0.0;
  double piA1 = 0.0;
};

DecayReport check_decay(const VectorConfig& cfg, double decay_tol = 1e-6);

// W+_{mu nu} = D_mu W+_nu - D_nu W+_mu with D_mu = d_mu - i e A_mu.
// Layout [t][z][y][x]; mu > nu is the exact negation, mu == nu is zero.
std::vector<std::complex<double>> vector_field_strength(
    const VectorConfig& cfg, int mu, int nu);

VectorFunctionalSet compute_vector_functionals(const VectorConfig& cfg,
                                               const EvalOptions& opts = {});

struct VectorVirialReport {
  double beta = 0.0;
  double value = 0.0;
  // term coefficients applied to {Pi_W0, Pi_W1, V0, V1, Pi_A0, Pi_A1}
  double t_piW0 = 0.0, t_piW1 = 0.0, t_v0 = 0.0, t_v1 = 0.0, t_piA0 = 0.0,
         t_piA1 = 0.0;
};

// dS/dlambda|_1 = (2b-3) Pi_W0 - (2b-1) Pi_W1 + (2b-5) V0 - (2b-3) V1
//                 - Pi_A0 - Pi_A1; at beta = 3/2 the Pi_W0 and V1
// coefficients vanish identically.
VectorVirialReport vector_virial_derivative(const VectorFunctionalSet& fns,
                                            double beta);

struct HelmholtzReport {
  double norm_div = 0.0;   // L2 of div W+ (spatial vector part)
  double norm_curl = 0.0;  // L2 of rot W+
  double norm_w0 = 0.0;    // L2 of W+_0
  double norm_f = 0.0;     // L2 of all Maxwell components
  bool a_is_zero = true;   // diagnostics assume A == 0; warn otherwise
};

HelmholtzReport helmholtz_diagnostics(const VectorConfig& cfg);

struct RigidityReport {
  bool preconditions_ok = false;
  double norm_div = 0.0;
  double norm_curl = 0.0;
  double boundary_max = 0.0;
  double potential_norm = 0.0;  // L2 of the fitted scalar potential
  double grad_fit_residual = 0.0;  // L2 of W+ - grad(fit)
  double field_norm = 0.0;         // L2 of the spatial W+
  double scale = 0.0;
  bool certified_trivial = false;
};

// Discrete version of the rigidity step: a decaying spatial field with
// vanishing divergence and curl is the gradient of a harmonic potential
// with decaying boundary data, which the maximum principle forces to a
// constant.  Solves the Dirichlet Poisson problem per time slice and
// reports how much field survives.
RigidityReport harmonic_rigidity_check(const VectorConfig& cfg,
                                       double tol = 1e-6);

}  // namespace virial

#endif  // VIRIAL_VECTOR_THEORY_HPP_
