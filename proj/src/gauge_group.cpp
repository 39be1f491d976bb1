#include "virial/gauge_group.hpp"

#include <cmath>
#include <stdexcept>

namespace virial {

std::vector<GaugeGroup::CEntry> GaugeGroup::nonzero_structure() const {
  std::vector<CEntry> out;
  for (int a = 0; a < dim_adjoint; ++a)
    for (int b = 0; b < dim_adjoint; ++b)
      for (int c = 0; c < dim_adjoint; ++c) {
        double v = structure_at(a, b, c);
        if (v != 0.0) out.push_back({a, b, c, v});
      }
  return out;
}

void GaugeGroup::validate() const {
  const int na = dim_adjoint;
  if (na < 1 || n_rep < 1)
    throw std::invalid_argument("gauge group dimensions must be positive");
  if (structure.size() != static_cast<std::size_t>(na) * na * na)
    throw std::invalid_argument("structure constant tensor has wrong size");
  if (generators.size() != static_cast<std::size_t>(na) * n_rep * n_rep)
    throw std::invalid_argument("generator array has wrong size");

  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b)
      for (int c = 0; c < na; ++c) {
        double v = structure_at(a, b, c);
        if (std::fabs(v + structure_at(b, a, c)) > 1e-12 ||
            std::fabs(v + structure_at(a, c, b)) > 1e-12)
          throw std::invalid_argument(
              "structure constants are not totally antisymmetric");
      }

  for (int a = 0; a < na; ++a)
    for (int r = 0; r < n_rep; ++r)
      for (int c = 0; c < n_rep; ++c) {
        std::complex<double> d =
            generator_at(a, r, c) - std::conj(generator_at(a, c, r));
        if (std::abs(d) > 1e-12)
          throw std::invalid_argument("generators are not Hermitian");
      }

  // Jacobi: sum_e C[a][b][e] C[e][c][d] + cyclic in (a,b,c) = 0
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b)
      for (int c = 0; c < na; ++c)
        for (int d = 0; d < na; ++d) {
          double sum = 0.0;
          for (int e = 0; e < na; ++e)
            sum += structure_at(a, b, e) * structure_at(e, c, d) +
                   structure_at(b, c, e) * structure_at(e, a, d) +
                   structure_at(c, a, e) * structure_at(e, b, d);
          if (std::fabs(sum) > 1e-10)
            throw std::invalid_argument(
                "structure constants violate the Jacobi identity");
        }
}

GaugeGroup GaugeGroup::u1(double coupling, double charge) {
  GaugeGroup g;
  g.name = "u1";
  g.dim_adjoint = 1;
  g.n_rep = 1;
  g.coupling = coupling;
  g.structure.assign(1, 0.0);
  g.generators.assign(1, std::complex<double>(charge, 0.0));
  return g;
}

GaugeGroup GaugeGroup::su2(double coupling) {
  GaugeGroup g;
  g.name = "su2";
  g.dim_adjoint = 3;
  g.n_rep = 2;
  g.coupling = coupling;
  g.structure.assign(27, 0.0);
  auto set_eps = [&](int a, int b, int c, double v) {
    g.structure[(static_cast<std::size_t>(a) * 3 + b) * 3 + c] = v;
  };
  set_eps(0, 1, 2, 1.0);
  set_eps(1, 2, 0, 1.0);
  set_eps(2, 0, 1, 1.0);
  set_eps(1, 0, 2, -1.0);
  set_eps(2, 1, 0, -1.0);
  set_eps(0, 2, 1, -1.0);
  // T^a = sigma^a / 2
  using cd = std::complex<double>;
  g.generators = {
      // sigma_1 / 2
      cd(0.0, 0.0), cd(0.5, 0.0), cd(0.5, 0.0), cd(0.0, 0.0),
      // sigma_2 / 2
      cd(0.0, 0.0), cd(0.0, -0.5), cd(0.0, 0.5), cd(0.0, 0.0),
      // sigma_3 / 2
      cd(0.5, 0.0), cd(0.0, 0.0), cd(0.0, 0.0), cd(-0.5, 0.0)};
  return g;
}

}  // namespace virial
