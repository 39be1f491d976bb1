#include "virial/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "virial/parallel.hpp"
#include "virial/potential.hpp"
#include "virial/stencil.hpp"

namespace virial {

using cd = std::complex<double>;

ScalarGaugeConfig ScalarGaugeConfig::zeros(const GridSpec& grid,
                                           const GaugeGroup& group,
                                           bool with_gauge_field) {
  grid.validate();
  ScalarGaugeConfig cfg;
  cfg.grid = grid;
  cfg.group = group;
  cfg.phi.assign(grid.sites() * group.n_rep, cd(0.0, 0.0));
  if (with_gauge_field)
    cfg.a.assign(4 * static_cast<std::size_t>(group.dim_adjoint) *
                     grid.sites(),
                 0.0);
  return cfg;
}

void ScalarGaugeConfig::validate() const {
  grid.validate();
  if (phi.size() != grid.sites() * group.n_rep)
    throw std::invalid_argument("phi array size mismatch");
  if (!a.empty() &&
      a.size() != 4 * static_cast<std::size_t>(group.dim_adjoint) *
                      grid.sites())
    throw std::invalid_argument("gauge field array size mismatch");
}

double action_value(const FunctionalSet& f) {
  return f.pi0 - f.pi1 - f.int_v + f.piA0 - f.piA1;
}

// ---------------------------------------------------------------------------
// Decay / staticness

DecayReport check_decay(const ScalarGaugeConfig& cfg, double decay_tol) {
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x, nr = cfg.group.n_rep;
  double phi_max = 0.0, phi_shell = 0.0;
  for (int t = 0; t < nt; ++t)
    for (int z = 0; z < nx; ++z)
      for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x) {
          double s = 0.0;
          for (int c = 0; c < nr; ++c)
            s += std::norm(cfg.phi[cfg.phi_index(t, z, y, x, c)]);
          phi_max = std::max(phi_max, s);
          bool shell = x == 0 || x == nx - 1 || y == 0 || y == nx - 1 ||
                       z == 0 || z == nx - 1;
          if (shell) phi_shell = std::max(phi_shell, s);
        }

  double a_max = 0.0, a_shell = 0.0;
  if (!cfg.a.empty()) {
    for (int mu = 0; mu < 4; ++mu)
      for (int ad = 0; ad < cfg.group.dim_adjoint; ++ad)
        for (int t = 0; t < nt; ++t)
          for (int z = 0; z < nx; ++z)
            for (int y = 0; y < nx; ++y)
              for (int x = 0; x < nx; ++x) {
                double v =
                    std::fabs(cfg.a[cfg.a_index(mu, ad, t, z, y, x)]);
                a_max = std::max(a_max, v);
                bool shell = x == 0 || x == nx - 1 || y == 0 ||
                             y == nx - 1 || z == 0 || z == nx - 1;
                if (shell) a_shell = std::max(a_shell, v);
              }
  }

  DecayReport rep;
  rep.decay_tol = decay_tol;
  rep.phi_boundary_ratio = phi_max > 0.0 ? std::sqrt(phi_shell / phi_max) : 0.0;
  rep.a_boundary_ratio = a_max > 0.0 ? a_shell / a_max : 0.0;
  rep.pass = rep.phi_boundary_ratio <= decay_tol &&
             rep.a_boundary_ratio <= decay_tol;
  return rep;
}

bool is_static(const ScalarGaugeConfig& cfg, double tol) {
  const int nt = cfg.grid.n_t;
  const std::size_t slab = cfg.grid.spatial_sites() * cfg.group.n_rep;
  double phi_max = 0.0;
  for (const cd& v : cfg.phi) phi_max = std::max(phi_max, std::abs(v));
  for (int t = 1; t < nt; ++t)
    for (std::size_t j = 0; j < slab; ++j)
      if (std::abs(cfg.phi[t * slab + j] - cfg.phi[j]) > tol * phi_max)
        return false;
  if (!cfg.a.empty()) {
    double a_max = 0.0;
    for (double v : cfg.a) a_max = std::max(a_max, std::fabs(v));
    const std::size_t sp = cfg.grid.spatial_sites();
    for (int mu = 0; mu < 4; ++mu)
      for (int ad = 0; ad < cfg.group.dim_adjoint; ++ad) {
        std::size_t base =
            (static_cast<std::size_t>(mu) * cfg.group.dim_adjoint + ad) *
            cfg.grid.sites();
        for (int t = 1; t < nt; ++t)
          for (std::size_t j = 0; j < sp; ++j)
            if (std::fabs(cfg.a[base + t * sp + j] - cfg.a[base + j]) >
                tol * a_max)
              return false;
      }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Derivative operators

namespace {

// Derivative of phi component c along axis mu at one site.
cd dphi_axis(const ScalarGaugeConfig& cfg, int mu, int t, int z, int y, int x,
             int c) {
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x;
  switch (mu) {
    case 0: {
      double w = 1.0 / (12.0 * cfg.grid.dt());
      return stencil::d1_periodic(
          [&](int k) { return cfg.phi[cfg.phi_index(k, z, y, x, c)]; }, t, nt,
          w);
    }
    case 1: {
      double w = 1.0 / (12.0 * cfg.grid.dx());
      return stencil::d1_bounded(
          [&](int k) { return cfg.phi[cfg.phi_index(t, z, y, k, c)]; }, x, nx,
          w);
    }
    case 2: {
      double w = 1.0 / (12.0 * cfg.grid.dx());
      return stencil::d1_bounded(
          [&](int k) { return cfg.phi[cfg.phi_index(t, z, k, x, c)]; }, y, nx,
          w);
    }
    default: {
      double w = 1.0 / (12.0 * cfg.grid.dx());
      return stencil::d1_bounded(
          [&](int k) { return cfg.phi[cfg.phi_index(t, k, y, x, c)]; }, z, nx,
          w);
    }
  }
}

double da_axis(const ScalarGaugeConfig& cfg, int mu_field, int ad, int axis,
               int t, int z, int y, int x) {
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x;
  switch (axis) {
    case 0: {
      double w = 1.0 / (12.0 * cfg.grid.dt());
      return stencil::d1_periodic(
          [&](int k) { return cfg.a[cfg.a_index(mu_field, ad, k, z, y, x)]; },
          t, nt, w);
    }
    case 1: {
      double w = 1.0 / (12.0 * cfg.grid.dx());
      return stencil::d1_bounded(
          [&](int k) { return cfg.a[cfg.a_index(mu_field, ad, t, z, y, k)]; },
          x, nx, w);
    }
    case 2: {
      double w = 1.0 / (12.0 * cfg.grid.dx());
      return stencil::d1_bounded(
          [&](int k) { return cfg.a[cfg.a_index(mu_field, ad, t, z, k, x)]; },
          y, nx, w);
    }
    default: {
      double w = 1.0 / (12.0 * cfg.grid.dx());
      return stencil::d1_bounded(
          [&](int k) { return cfg.a[cfg.a_index(mu_field, ad, t, k, y, x)]; },
          z, nx, w);
    }
  }
}

}  // namespace

std::vector<cd> covariant_derivative(const ScalarGaugeConfig& cfg, int mu) {
  cfg.validate();
  if (mu < 0 || mu > 3) throw std::invalid_argument("mu must be in 0..3");
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x, nr = cfg.group.n_rep;
  const int na = cfg.group.dim_adjoint;
  const double g = cfg.group.coupling;
  std::vector<cd> out(cfg.phi.size());

  parallel_for(nt, [&](std::size_t ti) {
    int t = static_cast<int>(ti);
    std::vector<cd> tphi(nr);
    for (int z = 0; z < nx; ++z)
      for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x) {
          for (int c = 0; c < nr; ++c)
            out[cfg.phi_index(t, z, y, x, c)] =
                dphi_axis(cfg, mu, t, z, y, x, c);
          if (!cfg.a.empty()) {
            // minus i g (sum_a A^a_mu T^a) phi
            for (int c = 0; c < nr; ++c) tphi[c] = cd(0.0, 0.0);
            for (int ad = 0; ad < na; ++ad) {
              double av = cfg.a[cfg.a_index(mu, ad, t, z, y, x)];
              if (av == 0.0) continue;
              for (int r = 0; r < nr; ++r) {
                cd acc(0.0, 0.0);
                for (int c = 0; c < nr; ++c)
                  acc += cfg.group.generator_at(ad, r, c) *
                         cfg.phi[cfg.phi_index(t, z, y, x, c)];
                tphi[r] += av * acc;
              }
            }
            for (int c = 0; c < nr; ++c)
              out[cfg.phi_index(t, z, y, x, c)] -=
                  cd(0.0, g) * tphi[c];
          }
        }
  });
  return out;
}

std::vector<double> field_strength(const ScalarGaugeConfig& cfg, int mu,
                                   int nu) {
  cfg.validate();
  if (mu < 0 || mu > 3 || nu < 0 || nu > 3)
    throw std::invalid_argument("mu, nu must be in 0..3");
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x;
  const int na = cfg.group.dim_adjoint;
  std::vector<double> out(static_cast<std::size_t>(na) * cfg.grid.sites(),
                          0.0);
  if (mu == nu || cfg.a.empty()) return out;
  if (mu > nu) {
    out = field_strength(cfg, nu, mu);
    for (double& v : out) v = -v;
    return out;
  }

  const double g = cfg.group.coupling;
  const auto centries = cfg.group.nonzero_structure();
  const std::size_t sp = cfg.grid.spatial_sites();

  parallel_for(nt, [&](std::size_t ti) {
    int t = static_cast<int>(ti);
    for (int z = 0; z < nx; ++z)
      for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x) {
          std::size_t site =
              ((static_cast<std::size_t>(z) * nx + y) * nx + x);
          for (int ad = 0; ad < na; ++ad)
            out[ad * cfg.grid.sites() + t * sp + site] =
                da_axis(cfg, nu, ad, mu, t, z, y, x) -
                da_axis(cfg, mu, ad, nu, t, z, y, x);
          for (const auto& ce : centries) {
            double term = g * ce.value *
                          cfg.a[cfg.a_index(mu, ce.b, t, z, y, x)] *
                          cfg.a[cfg.a_index(nu, ce.c, t, z, y, x)];
            out[ce.a * cfg.grid.sites() + t * sp + site] += term;
          }
        }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Functionals

namespace {

// Potential evaluation with the removable-limit guard at s == 0 (needed
// e.g. for -s ln(s) on sites where the field vanishes identically).
struct LatticePotential {
  CompiledPotential v, vp;
  double v0 = 0.0, svp0 = 0.0;
  bool v0_ok = false, svp0_ok = false;

  explicit LatticePotential(const PotentialExpr& expr)
      : v(expr), vp(differentiate(expr)) {
    LimitResult lv = limit_at_zero_plus(expr);
    v0_ok = !lv.domain_error && lv.finite;
    v0 = lv.value;
    LimitResult lsvp = limit_at_zero_plus(
        PotentialExpr(make_mul(make_var(), differentiate(expr).root())));
    svp0_ok = !lsvp.domain_error && lsvp.finite;
    svp0 = lsvp.value;
  }

  double value(double s) const {
    double out;
    if (v.try_eval(s, &out)) return out;
    if (s == 0.0 && v0_ok) return v0;
    throw EvalDomainError("potential undefined at s = " + format_g17(s));
  }

  double vprime_s(double s) const {
    double out;
    if (vp.try_eval(s, &out)) return out * s;
    if (s == 0.0 && svp0_ok) return svp0;
    throw EvalDomainError("potential slope undefined at s = " +
                          format_g17(s));
  }
};

struct SliceSums {
  KahanSum pi0, pi1, piA0, piA1, int_v, int_vp_s;
};

void enforce_decay_or_throw(const ScalarGaugeConfig& cfg,
                            const EvalOptions& opts) {
  if (!opts.enforce_decay) return;
  DecayReport rep = check_decay(cfg, opts.decay_tol);
  if (!rep.pass)
    throw DecayViolation(
        "boundary contamination: phi ratio " +
            format_g17(rep.phi_boundary_ratio) + ", A ratio " +
            format_g17(rep.a_boundary_ratio) + " exceed decay_tol " +
            format_g17(opts.decay_tol),
        rep);
}

}  // namespace

FunctionalSet compute_functionals(const ScalarGaugeConfig& cfg,
                                  const PotentialExpr& potential,
                                  const EvalOptions& opts) {
  cfg.validate();
  enforce_decay_or_throw(cfg, opts);

  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x, nr = cfg.group.n_rep;
  const int na = cfg.group.dim_adjoint;
  const double g = cfg.group.coupling;
  const bool gauged = !cfg.a.empty();
  const auto centries = cfg.group.nonzero_structure();
  const LatticePotential pot(potential);

  std::vector<SliceSums> partial(nt);

  parallel_for(nt, [&](std::size_t ti) {
    int t = static_cast<int>(ti);
    SliceSums& sums = partial[t];
    std::vector<cd> dphi(nr), gauge(nr);
    for (int z = 0; z < nx; ++z)
      for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x) {
          // scalar kinetic terms
          double s = 0.0;
          for (int c = 0; c < nr; ++c)
            s += std::norm(cfg.phi[cfg.phi_index(t, z, y, x, c)]);

          for (int mu = 0; mu < 4; ++mu) {
            for (int c = 0; c < nr; ++c)
              dphi[c] = dphi_axis(cfg, mu, t, z, y, x, c);
            if (gauged) {
              for (int c = 0; c < nr; ++c) gauge[c] = cd(0.0, 0.0);
              for (int ad = 0; ad < na; ++ad) {
                double av = cfg.a[cfg.a_index(mu, ad, t, z, y, x)];
                if (av == 0.0) continue;
                for (int r = 0; r < nr; ++r) {
                  cd acc(0.0, 0.0);
                  for (int c = 0; c < nr; ++c)
                    acc += cfg.group.generator_at(ad, r, c) *
                           cfg.phi[cfg.phi_index(t, z, y, x, c)];
                  gauge[r] += av * acc;
                }
              }
              for (int c = 0; c < nr; ++c) dphi[c] -= cd(0.0, g) * gauge[c];
            }
            double norm2 = 0.0;
            for (int c = 0; c < nr; ++c) norm2 += std::norm(dphi[c]);
            if (mu == 0)
              sums.pi0.add(norm2);
            else
              sums.pi1.add(norm2);
          }

          sums.int_v.add(pot.value(s));
          sums.int_vp_s.add(pot.vprime_s(s));

          if (gauged) {
            // electric: F^a_{0i}, magnetic: F^a_{ij}, i < j
            for (int i = 1; i <= 3; ++i) {
              for (int ad = 0; ad < na; ++ad) {
                double f = da_axis(cfg, i, ad, 0, t, z, y, x) -
                           da_axis(cfg, 0, ad, i, t, z, y, x);
                for (const auto& ce : centries)
                  if (ce.a == ad)
                    f += g * ce.value *
                         cfg.a[cfg.a_index(0, ce.b, t, z, y, x)] *
                         cfg.a[cfg.a_index(i, ce.c, t, z, y, x)];
                sums.piA0.add(0.5 * f * f);
              }
            }
            for (int i = 1; i <= 3; ++i)
              for (int j = i + 1; j <= 3; ++j) {
                for (int ad = 0; ad < na; ++ad) {
                  double f = da_axis(cfg, j, ad, i, t, z, y, x) -
                             da_axis(cfg, i, ad, j, t, z, y, x);
                  for (const auto& ce : centries)
                    if (ce.a == ad)
                      f += g * ce.value *
                           cfg.a[cfg.a_index(i, ce.b, t, z, y, x)] *
                           cfg.a[cfg.a_index(j, ce.c, t, z, y, x)];
                  sums.piA1.add(0.5 * f * f);  // 1/4 * (2 ordered pairs)
                }
              }
          }
        }
  });

  const double w = cfg.grid.dt() * std::pow(cfg.grid.dx(), 3);
  FunctionalSet out;
  KahanSum pi0, pi1, piA0, piA1, int_v, int_vp_s;
  for (int t = 0; t < nt; ++t) {
    pi0.add(partial[t].pi0.value());
    pi1.add(partial[t].pi1.value());
    piA0.add(partial[t].piA0.value());
    piA1.add(partial[t].piA1.value());
    int_v.add(partial[t].int_v.value());
    int_vp_s.add(partial[t].int_vp_s.value());
  }
  out.pi0 = pi0.value() * w;
  out.pi1 = pi1.value() * w;
  out.piA0 = piA0.value() * w;
  out.piA1 = piA1.value() * w;
  out.int_v = int_v.value() * w;
  out.int_vp_s = int_vp_s.value() * w;
  return out;
}

double integrate_potential(const ScalarGaugeConfig& cfg,
                           const PotentialExpr& potential, double arg_scale) {
  cfg.validate();
  if (!(arg_scale > 0.0))
    throw std::invalid_argument("arg_scale must be positive");
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x, nr = cfg.group.n_rep;
  const LatticePotential pot(potential);

  std::vector<KahanSum> partial(nt);
  parallel_for(nt, [&](std::size_t ti) {
    int t = static_cast<int>(ti);
    KahanSum& sum = partial[t];
    for (int z = 0; z < nx; ++z)
      for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x) {
          double s = 0.0;
          for (int c = 0; c < nr; ++c)
            s += std::norm(cfg.phi[cfg.phi_index(t, z, y, x, c)]);
          sum.add(pot.value(arg_scale * s));
        }
  });

  KahanSum total;
  for (int t = 0; t < nt; ++t) total.add(partial[t].value());
  return total.value() * cfg.grid.dt() * std::pow(cfg.grid.dx(), 3);
}

}  // namespace virial
