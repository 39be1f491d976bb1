#include "virial/vector_theory.hpp"

#include <cmath>

#include "virial/jsonio.hpp"
#include "virial/parallel.hpp"
#include "virial/stencil.hpp"

namespace virial {

using cd = std::complex<double>;

VectorConfig VectorConfig::zeros(const GridSpec& grid, double e_charge,
                                 double mass_m, bool with_gauge_field) {
  grid.validate();
  VectorConfig cfg;
  cfg.grid = grid;
  cfg.e_charge = e_charge;
  cfg.mass_m = mass_m;
  cfg.w.assign(4 * grid.sites(), cd(0.0, 0.0));
  if (with_gauge_field) cfg.a.assign(4 * grid.sites(), 0.0);
  return cfg;
}

void VectorConfig::validate() const {
  grid.validate();
  if (mass_m == 0.0) throw std::invalid_argument("mass_m must be nonzero");
  if (w.size() != 4 * grid.sites())
    throw std::invalid_argument("w array size mismatch");
  if (!a.empty() && a.size() != 4 * grid.sites())
    throw std::invalid_argument("gauge field array size mismatch");
}

DecayReport check_decay(const VectorConfig& cfg, double decay_tol) {
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x;
  double w_max = 0.0, w_shell = 0.0, a_max = 0.0, a_shell = 0.0;
  for (int mu = 0; mu < 4; ++mu)
    for (int t = 0; t < nt; ++t)
      for (int z = 0; z < nx; ++z)
        for (int y = 0; y < nx; ++y)
          for (int x = 0; x < nx; ++x) {
            bool shell = x == 0 || x == nx - 1 || y == 0 || y == nx - 1 ||
                         z == 0 || z == nx - 1;
            double wv = std::abs(cfg.w[cfg.w_index(mu, t, z, y, x)]);
            w_max = std::max(w_max, wv);
            if (shell) w_shell = std::max(w_shell, wv);
            if (!cfg.a.empty()) {
              double av = std::fabs(cfg.a[cfg.a_index(mu, t, z, y, x)]);
              a_max = std::max(a_max, av);
              if (shell) a_shell = std::max(a_shell, av);
            }
          }
  DecayReport rep;
  rep.decay_tol = decay_tol;
  rep.phi_boundary_ratio = w_max > 0.0 ? w_shell / w_max : 0.0;
  rep.a_boundary_ratio = a_max > 0.0 ? a_shell / a_max : 0.0;
  rep.pass = rep.phi_boundary_ratio <= decay_tol &&
             rep.a_boundary_ratio <= decay_tol;
  return rep;
}

namespace {

// d_axis W+_mu at one site (axis: 0 = t periodic, 1..3 = x,y,z bounded)
cd dw_axis(const VectorConfig& cfg, int mu_field, int axis, int t, int z,
           int y, int x) {
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x;
  switch (axis) {
    case 0: {
      double w = 1.0 / (12.0 * cfg.grid.dt());
      return stencil::d1_periodic(
          [&](int k) { return cfg.w[cfg.w_index(mu_field, k, z, y, x)]; }, t,
          nt, w);
    }
    case 1: {
      double w = 1.0 / (12.0 * cfg.grid.dx());
      return stencil::d1_bounded(
          [&](int k) { return cfg.w[cfg.w_index(mu_field, t, z, y, k)]; }, x,
          nx, w);
    }
    case 2: {
      double w = 1.0 / (12.0 * cfg.grid.dx());
      return stencil::d1_bounded(
          [&](int k) { return cfg.w[cfg.w_index(mu_field, t, z, k, x)]; }, y,
          nx, w);
    }
    default: {
      double w = 1.0 / (12.0 * cfg.grid.dx());
      return stencil::d1_bounded(
          [&](int k) { return cfg.w[cfg.w_index(mu_field, t, k, y, x)]; }, z,
          nx, w);
    }
  }
}

double da_axis_v(const VectorConfig& cfg, int mu_field, int axis, int t,
                 int z, int y, int x) {
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x;
  switch (axis) {
    case 0: {
      double w = 1.0 / (12.0 * cfg.grid.dt());
      return stencil::d1_periodic(
          [&](int k) { return cfg.a[cfg.a_index(mu_field, k, z, y, x)]; }, t,
          nt, w);
    }
    case 1: {
      double w = 1.0 / (12.0 * cfg.grid.dx());
      return stencil::d1_bounded(
          [&](int k) { return cfg.a[cfg.a_index(mu_field, t, z, y, k)]; }, x,
          nx, w);
    }
    case 2: {
      double w = 1.0 / (12.0 * cfg.grid.dx());
      return stencil::d1_bounded(
          [&](int k) { return cfg.a[cfg.a_index(mu_field, t, z, k, x)]; }, y,
          nx, w);
    }
    default: {
      double w = 1.0 / (12.0 * cfg.grid.dx());
      return stencil::d1_bounded(
          [&](int k) { return cfg.a[cfg.a_index(mu_field, t, k, y, x)]; }, z,
          nx, w);
    }
  }
}

// D_mu W+_nu = d_mu W+_nu - i e A_mu W+_nu at one site
cd cov_dw(const VectorConfig& cfg, int mu, int nu, int t, int z, int y,
          int x) {
  cd d = dw_axis(cfg, nu, mu, t, z, y, x);
  if (!cfg.a.empty())
    d -= cd(0.0, cfg.e_charge) * cfg.a[cfg.a_index(mu, t, z, y, x)] *
         cfg.w[cfg.w_index(nu, t, z, y, x)];
  return d;
}

}  // namespace

std::vector<cd> vector_field_strength(const VectorConfig& cfg, int mu,
                                      int nu) {
  cfg.validate();
  if (mu < 0 || mu > 3 || nu < 0 || nu > 3)
    throw std::invalid_argument("mu, nu must be in 0..3");
  std::vector<cd> out(cfg.grid.sites(), cd(0.0, 0.0));
  if (mu == nu) return out;
  if (mu > nu) {
    out = vector_field_strength(cfg, nu, mu);
    for (cd& v : out) v = -v;
    return out;
  }
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x;
  const std::size_t sp = cfg.grid.spatial_sites();
  parallel_for(nt, [&](std::size_t ti) {
    int t = static_cast<int>(ti);
    for (int z = 0; z < nx; ++z)
      for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x) {
          std::size_t site = (static_cast<std::size_t>(z) * nx + y) * nx + x;
          out[t * sp + site] = cov_dw(cfg, mu, nu, t, z, y, x) -
                               cov_dw(cfg, nu, mu, t, z, y, x);
        }
  });
  return out;
}

VectorFunctionalSet compute_vector_functionals(const VectorConfig& cfg,
                                               const EvalOptions& opts) {
  cfg.validate();
  if (opts.enforce_decay) {
    DecayReport rep = check_decay(cfg, opts.decay_tol);
    if (!rep.pass)
      throw DecayViolation(
          "boundary contamination: W ratio " +
              format_g17(rep.phi_boundary_ratio) + ", A ratio " +
              format_g17(rep.a_boundary_ratio) + " exceed decay_tol " +
              format_g17(opts.decay_tol),
          rep);
  }

  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x;
  const double m2 = cfg.mass_m * cfg.mass_m;
  const bool gauged = !cfg.a.empty();

  struct Sums {
    KahanSum piW0, piW1, v0, v1, piA0, piA1;
  };
  std::vector<Sums> partial(nt);

  parallel_for(nt, [&](std::size_t ti) {
    int t = static_cast<int>(ti);
    Sums& sums = partial[t];
    for (int z = 0; z < nx; ++z)
      for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x) {
          for (int i = 1; i <= 3; ++i) {
            cd w0i = cov_dw(cfg, 0, i, t, z, y, x) -
                     cov_dw(cfg, i, 0, t, z, y, x);
            sums.piW0.add(std::norm(w0i));
          }
          for (int i = 1; i <= 3; ++i)
            for (int j = i + 1; j <= 3; ++j) {
              cd wij = cov_dw(cfg, i, j, t, z, y, x) -
                       cov_dw(cfg, j, i, t, z, y, x);
              sums.piW1.add(std::norm(wij));  // 1/2 * (2 ordered pairs)
            }
          sums.v0.add(m2 * std::norm(cfg.w[cfg.w_index(0, t, z, y, x)]));
          double v1 = 0.0;
          for (int i = 1; i <= 3; ++i)
            v1 += std::norm(cfg.w[cfg.w_index(i, t, z, y, x)]);
          sums.v1.add(m2 * v1);
          if (gauged) {
            for (int i = 1; i <= 3; ++i) {
              double f = da_axis_v(cfg, i, 0, t, z, y, x) -
                         da_axis_v(cfg, 0, i, t, z, y, x);
              sums.piA0.add(0.5 * f * f);
            }
            for (int i = 1; i <= 3; ++i)
              for (int j = i + 1; j <= 3; ++j) {
                double f = da_axis_v(cfg, j, i, t, z, y, x) -
                           da_axis_v(cfg, i, j, t, z, y, x);
                sums.piA1.add(0.5 * f * f);
              }
          }
        }
  });

  const double w = cfg.grid.dt() * std::pow(cfg.grid.dx(), 3);
  KahanSum piW0, piW1, v0, v1, piA0, piA1;
  for (int t = 0; t < nt; ++t) {
    piW0.add(partial[t].piW0.value());
    piW1.add(partial[t].piW1.value());
    v0.add(partial[t].v0.value());
    v1.add(partial[t].v1.value());
    piA0.add(partial[t].piA0.value());
    piA1.add(partial[t].piA1.value());
  }
  VectorFunctionalSet out;
  out.piW0 = piW0.value() * w;
  out.piW1 = piW1.value() * w;
  out.v0 = v0.value() * w;
  out.v1 = v1.value() * w;
  out.piA0 = piA0.value() * w;
  out.piA1 = piA1.value() * w;
  return out;
}

VectorVirialReport vector_virial_derivative(const VectorFunctionalSet& fns,
                                            double beta) {
  VectorVirialReport rep;
  rep.beta = beta;
  rep.t_piW0 = (2.0 * beta - 3.0) * fns.piW0;
  rep.t_piW1 = -(2.0 * beta - 1.0) * fns.piW1;
  rep.t_v0 = (2.0 * beta - 5.0) * fns.v0;
  rep.t_v1 = -(2.0 * beta - 3.0) * fns.v1;
  rep.t_piA0 = -fns.piA0;
  rep.t_piA1 = -fns.piA1;
  rep.value = rep.t_piW0 + rep.t_piW1 + rep.t_v0 + rep.t_v1 + rep.t_piA0 +
              rep.t_piA1;
  return rep;
}

HelmholtzReport helmholtz_diagnostics(const VectorConfig& cfg) {
  cfg.validate();
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x;

  struct Sums {
    KahanSum div, curl, w0, f;
  };
  std::vector<Sums> partial(nt);

  parallel_for(nt, [&](std::size_t ti) {
    int t = static_cast<int>(ti);
    Sums& sums = partial[t];
    for (int z = 0; z < nx; ++z)
      for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x) {
          cd div = dw_axis(cfg, 1, 1, t, z, y, x) +
                   dw_axis(cfg, 2, 2, t, z, y, x) +
                   dw_axis(cfg, 3, 3, t, z, y, x);
          sums.div.add(std::norm(div));
          cd curl_x = dw_axis(cfg, 3, 2, t, z, y, x) -
                      dw_axis(cfg, 2, 3, t, z, y, x);
          cd curl_y = dw_axis(cfg, 1, 3, t, z, y, x) -
                      dw_axis(cfg, 3, 1, t, z, y, x);
          cd curl_z = dw_axis(cfg, 2, 1, t, z, y, x) -
                      dw_axis(cfg, 1, 2, t, z, y, x);
          sums.curl.add(std::norm(curl_x) + std::norm(curl_y) +
                        std::norm(curl_z));
          sums.w0.add(std::norm(cfg.w[cfg.w_index(0, t, z, y, x)]));
          if (!cfg.a.empty()) {
            double fsq = 0.0;
            for (int i = 1; i <= 3; ++i) {
              double f0i = da_axis_v(cfg, i, 0, t, z, y, x) -
                           da_axis_v(cfg, 0, i, t, z, y, x);
              fsq += f0i * f0i;
            }
            for (int i = 1; i <= 3; ++i)
              for (int j = i + 1; j <= 3; ++j) {
                double fij = da_axis_v(cfg, j, i, t, z, y, x) -
                             da_axis_v(cfg, i, j, t, z, y, x);
                fsq += 2.0 * fij * fij;  // both orderings
              }
            sums.f.add(fsq);
          }
        }
  });

  const double w = cfg.grid.dt() * std::pow(cfg.grid.dx(), 3);
  KahanSum div, curl, w0, f;
  for (int t = 0; t < nt; ++t) {
    div.add(partial[t].div.value());
    curl.add(partial[t].curl.value());
    w0.add(partial[t].w0.value());
    f.add(partial[t].f.value());
  }
  HelmholtzReport rep;
  rep.norm_div = std::sqrt(div.value() * w);
  rep.norm_curl = std::sqrt(curl.value() * w);
  rep.norm_w0 = std::sqrt(w0.value() * w);
  rep.norm_f = std::sqrt(f.value() * w);
  rep.a_is_zero = cfg.a.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Rigidity certificate

namespace {

// Matrix-free CG for -laplace(phi) = rhs with zero Dirichlet boundary,
// 7-point 2nd-order stencil on the interior of one time slice.
class PoissonSlice {
 public:
  PoissonSlice(int nx, double dx) : nx_(nx), ni_(nx - 2), dx2_(dx * dx) {}

  std::size_t size() const {
    return static_cast<std::size_t>(ni_) * ni_ * ni_;
  }
  std::size_t idx(int z, int y, int x) const {  // interior coordinates
    return (static_cast<std::size_t>(z) * ni_ + y) * ni_ + x;
  }

  void apply(const std::vector<double>& in, std::vector<double>& out) const {
    for (int z = 0; z < ni_; ++z)
      for (int y = 0; y < ni_; ++y)
        for (int x = 0; x < ni_; ++x) {
          double c = in[idx(z, y, x)];
          double nb = 0.0;
          nb += x > 0 ? in[idx(z, y, x - 1)] : 0.0;
          nb += x < ni_ - 1 ? in[idx(z, y, x + 1)] : 0.0;
          nb += y > 0 ? in[idx(z, y - 1, x)] : 0.0;
          nb += y < ni_ - 1 ? in[idx(z, y + 1, x)] : 0.0;
          nb += z > 0 ? in[idx(z - 1, y, x)] : 0.0;
          nb += z < ni_ - 1 ? in[idx(z + 1, y, x)] : 0.0;
          out[idx(z, y, x)] = (6.0 * c - nb) / dx2_;
        }
  }

  // returns the final residual norm relative to |rhs|
  double solve(const std::vector<double>& rhs, std::vector<double>& phi,
               double rtol, int max_iter) const {
    const std::size_t n = size();
    phi.assign(n, 0.0);
    std::vector<double> r = rhs, p = rhs, ap(n);
    double rr = 0.0, bnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rr += r[i] * r[i];
      bnorm += rhs[i] * rhs[i];
    }
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) return 0.0;
    for (int it = 0; it < max_iter; ++it) {
      if (std::sqrt(rr) <= rtol * bnorm) break;
      apply(p, ap);
      double pap = 0.0;
      for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
      if (pap <= 0.0) break;
      double alpha = rr / pap;
      double rr_new = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        phi[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
        rr_new += r[i] * r[i];
      }
      double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    return std::sqrt(rr) / bnorm;
  }

 private:
  int nx_, ni_;
  double dx2_;
};

}  // namespace

RigidityReport harmonic_rigidity_check(const VectorConfig& cfg, double tol) {
  cfg.validate();
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x;
  const double dx = cfg.grid.dx();

  RigidityReport rep;
  HelmholtzReport helm = helmholtz_diagnostics(cfg);
  rep.norm_div = helm.norm_div;
  rep.norm_curl = helm.norm_curl;

  double w_absmax = 0.0;
  for (int i = 1; i <= 3; ++i)
    for (int t = 0; t < nt; ++t)
      for (int z = 0; z < nx; ++z)
        for (int y = 0; y < nx; ++y)
          for (int x = 0; x < nx; ++x) {
            double v = std::abs(cfg.w[cfg.w_index(i, t, z, y, x)]);
            w_absmax = std::max(w_absmax, v);
            bool shell = x == 0 || x == nx - 1 || y == 0 || y == nx - 1 ||
                         z == 0 || z == nx - 1;
            if (shell) rep.boundary_max = std::max(rep.boundary_max, v);
          }

  rep.preconditions_ok = rep.norm_div <= tol && rep.norm_curl <= tol &&
                         rep.boundary_max <= tol;

  // Dirichlet Poisson fit per slice: laplace(phi) = div W with phi = 0 on
  // the faces.  With div W ~ 0 and decaying data the maximum principle
  // pins phi ~ 0, so any surviving field norm is an obstruction.
  PoissonSlice poisson(nx, dx);
  const int ni = nx - 2;
  KahanSum phi_sq, res_sq, field_sq;

  for (int t = 0; t < nt; ++t) {
    std::vector<double> rhs_re(poisson.size()), rhs_im(poisson.size());
    for (int z = 0; z < ni; ++z)
      for (int y = 0; y < ni; ++y)
        for (int x = 0; x < ni; ++x) {
          // 2nd-order div at interior node (z+1, y+1, x+1)
          auto wat = [&](int mu, int dz, int dy, int dxo) {
            return cfg.w[cfg.w_index(mu, t, z + 1 + dz, y + 1 + dy,
                                     x + 1 + dxo)];
          };
          cd div = (wat(1, 0, 0, 1) - wat(1, 0, 0, -1) + wat(2, 0, 1, 0) -
                    wat(2, 0, -1, 0) + wat(3, 1, 0, 0) - wat(3, -1, 0, 0)) /
                   (2.0 * dx);
          // CG solves -laplace(phi) = -div
          rhs_re[poisson.idx(z, y, x)] = -div.real();
          rhs_im[poisson.idx(z, y, x)] = -div.imag();
        }
    std::vector<double> phi_re, phi_im;
    poisson.solve(rhs_re, phi_re, 1e-10, 20 * nx * nx);
    poisson.solve(rhs_im, phi_im, 1e-10, 20 * nx * nx);

    auto phi_at = [&](int z, int y, int x) -> cd {  // lattice coordinates
      if (x <= 0 || x >= nx - 1 || y <= 0 || y >= nx - 1 || z <= 0 ||
          z >= nx - 1)
        return cd(0.0, 0.0);
      return cd(phi_re[poisson.idx(z - 1, y - 1, x - 1)],
                phi_im[poisson.idx(z - 1, y - 1, x - 1)]);
    };

    for (int z = 1; z < nx - 1; ++z)
      for (int y = 1; y < nx - 1; ++y)
        for (int x = 1; x < nx - 1; ++x) {
          cd g1 = (phi_at(z, y, x + 1) - phi_at(z, y, x - 1)) / (2.0 * dx);
          cd g2 = (phi_at(z, y + 1, x) - phi_at(z, y - 1, x)) / (2.0 * dx);
          cd g3 = (phi_at(z + 1, y, x) - phi_at(z - 1, y, x)) / (2.0 * dx);
          cd w1 = cfg.w[cfg.w_index(1, t, z, y, x)];
          cd w2 = cfg.w[cfg.w_index(2, t, z, y, x)];
          cd w3 = cfg.w[cfg.w_index(3, t, z, y, x)];
          res_sq.add(std::norm(w1 - g1) + std::norm(w2 - g2) +
                     std::norm(w3 - g3));
          phi_sq.add(std::norm(phi_at(z, y, x)));
        }
    for (int z = 0; z < nx; ++z)
      for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x)
          for (int i = 1; i <= 3; ++i)
            field_sq.add(std::norm(cfg.w[cfg.w_index(i, t, z, y, x)]));
  }

  const double w = cfg.grid.dt() * std::pow(dx, 3);
  rep.potential_norm = std::sqrt(phi_sq.value() * w);
  rep.grad_fit_residual = std::sqrt(res_sq.value() * w);
  rep.field_norm = std::sqrt(field_sq.value() * w);
  rep.scale = std::sqrt(cfg.grid.period_t * std::pow(cfg.grid.box_l, 3)) *
              std::max(1.0, w_absmax);
  rep.certified_trivial =
      rep.preconditions_ok && rep.field_norm <= tol * rep.scale;
  return rep;
}

}  // namespace virial
