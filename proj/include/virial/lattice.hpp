#ifndef VIRIAL_LATTICE_HPP_
#define VIRIAL_LATTICE_HPP_

#include <complex>
#include <stdexcept>
#include <vector>

#include "virial/expr.hpp"
#include "virial/gauge_group.hpp"

namespace virial {

// Uniform spacetime grid: one time period [0, T) sampled at n_t points
// (periodic wrap) and the cube [-L/2, L/2)^3 at n_x points per axis.
struct GridSpec {
  double period_t = 1.0;
  double box_l = 1.0;
  int n_t = 4;
  int n_x = 8;

  double dt() const { return period_t / n_t; }
  double dx() const { return box_l / n_x; }
  double coord(int i) const { return -0.5 * box_l + i * dx(); }
  double time(int k) const { return k * dt(); }
  std::size_t spatial_sites() const {
    return static_cast<std::size_t>(n_x) * n_x * n_x;
  }
  std::size_t sites() const { return spatial_sites() * n_t; }

  void validate() const {
    if (n_t < 4) throw std::invalid_argument("n_t must be >= 4");
    if (n_x < 8) throw std::invalid_argument("n_x must be >= 8");
    if (!(period_t > 0.0) || !(box_l > 0.0))
      throw std::invalid_argument("period and box size must be positive");
  }
};

// Time-periodic scalar multiplet + gauge field samples.
// phi layout: [t][z][y][x][c], c = representation index, row-major.
// a layout:   [mu][a][t][z][y][x]; an empty vector means A == 0.
struct ScalarGaugeConfig {
  GridSpec grid;
  GaugeGroup group;
  std::vector<std::complex<double>> phi;
  std::vector<double> a;

  bool a_is_zero() const { return a.empty(); }

  std::size_t phi_index(int t, int z, int y, int x, int c) const {
    const int nx = grid.n_x, nr = group.n_rep;
    return (((static_cast<std::size_t>(t) * nx + z) * nx + y) * nx + x) * nr +
           c;
  }
  std::size_t a_index(int mu, int ad, int t, int z, int y, int x) const {
    const int nx = grid.n_x;
    return ((((static_cast<std::size_t>(mu) * group.dim_adjoint + ad) *
                  grid.n_t +
              t) *
                 nx +
             z) *
                nx +
            y) *
               nx +
           x;
  }

  static ScalarGaugeConfig zeros(const GridSpec& grid, const GaugeGroup& group,
                                 bool with_gauge_field);
  void validate() const;
};

// The scalar-sector integrals over one period: Pi_0 (|D_0 phi|^2),
// Pi_1 (|D_i phi|^2), Pi_A0 (1/2 F_{0i}^2), Pi_A1 (1/4 F_{ij}^2), and the
// potential integrals int V and int V'(s) s.
struct FunctionalSet {
  double pi0 = 0.0;
  double pi1 = 0.0;
  double piA0 = 0.0;
  double piA1 = 0.0;
  double int_v = 0.0;
  double int_vp_s = 0.0;

  double int_g_gamma(double gamma) const {
    return 2.0 * gamma * int_vp_s - 3.0 * int_v;
  }
};

// S = Pi0 - Pi1 - int V + Pi_A0 - Pi_A1 (metric +,-,-,-).
double action_value(const FunctionalSet& f);

struct DecayReport {
  double phi_boundary_ratio = 0.0;
  double a_boundary_ratio = 0.0;
  bool pass = true;
  double decay_tol = 0.0;
};

DecayReport check_decay(const ScalarGaugeConfig& cfg, double decay_tol = 1e-6);

class DecayViolation : public std::runtime_error {
 public:
  DecayViolation(const std::string& what, DecayReport report)
      : std::runtime_error(what), report(report) {}
  DecayReport report;
};

// D_mu phi = d_mu phi - i g T^a A^a_mu phi; 4th-order stencils, periodic
// wrap in t, one-sided at the spatial box faces.  Result has phi's layout.
std::vector<std::complex<double>> covariant_derivative(
    const ScalarGaugeConfig& cfg, int mu);

// F^a_{mu nu} = d_mu A^a_nu - d_nu A^a_mu + g C^{abc} A^b_mu A^c_nu,
// layout [a][t][z][y][x].  Computed for mu < nu; (nu, mu) is the exact
// negation and F_{mu mu} is identically zero.
std::vector<double> field_strength(const ScalarGaugeConfig& cfg, int mu,
                                   int nu);

struct EvalOptions {
  double decay_tol = 1e-6;
  bool enforce_decay = true;
};

// Quadrature: plain product rule, exact-order rectangle in the periodic
// time direction, trapezoid-equivalent in space for decaying fields.
FunctionalSet compute_functionals(const ScalarGaugeConfig& cfg,
                                  const PotentialExpr& potential,
                                  const EvalOptions& opts = {});

// int dt d^3x V(arg_scale * phi^dag phi); shares the reduction path with
// compute_functionals so arg_scale == 1 reproduces int_v bit-for-bit.
double integrate_potential(const ScalarGaugeConfig& cfg,
                           const PotentialExpr& potential, double arg_scale);

bool is_static(const ScalarGaugeConfig& cfg, double tol = 1e-12);

}  // namespace virial

#endif  // VIRIAL_LATTICE_HPP_
