#ifndef VIRIAL_GAUGE_GROUP_HPP_
#define VIRIAL_GAUGE_GROUP_HPP_

#include <complex>
#include <string>
#include <vector>

namespace virial {

// Compact gauge group data: totally antisymmetric structure constants
// C[a][b][c] and Hermitian generators T^a acting on the scalar multiplet.
struct GaugeGroup {
  std::string name = "u1";
  int dim_adjoint = 1;
  int n_rep = 1;
  double coupling = 1.0;
  std::vector<double> structure;                 // [a][b][c], row-major
  std::vector<std::complex<double>> generators;  // [a][row][col]

  double structure_at(int a, int b, int c) const {
    return structure[(static_cast<std::size_t>(a) * dim_adjoint + b) *
                         dim_adjoint +
                     c];
  }
  std::complex<double> generator_at(int a, int r, int c) const {
    return generators[(static_cast<std::size_t>(a) * n_rep + r) * n_rep + c];
  }

  // Nonzero structure constants, for the F_munu contraction.
  struct CEntry {
    int a, b, c;
    double value;
  };
  std::vector<CEntry> nonzero_structure() const;

  // Throws std::invalid_argument when antisymmetry (1e-12), Hermiticity
  // (1e-12) or the Jacobi identity (1e-10) fails.
  void validate() const;

  static GaugeGroup u1(double coupling = 1.0, double charge = 1.0);
  static GaugeGroup su2(double coupling = 1.0);  // fundamental, T^a = sigma^a/2
};

}  // namespace virial

#endif  // VIRIAL_GAUGE_GROUP_HPP_
