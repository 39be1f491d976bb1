#ifndef VIRIAL_BUNDLE_HPP_
#define VIRIAL_BUNDLE_HPP_

#include <string>
#include <variant>

#include "virial/lattice.hpp"
#include "virial/vector_theory.hpp"

namespace virial {

// On-disk field bundle: a directory holding manifest.json plus one raw
// little-endian row-major f64 file per array.  Complex arrays carry a
// trailing dimension of 2 for (re, im).  A missing gauge array means
// A == 0.

class BundleError : public std::runtime_error {
 public:
  explicit BundleError(const std::string& what) : std::runtime_error(what) {}
};

void write_bundle(const std::string& dir, const ScalarGaugeConfig& cfg);
void write_bundle(const std::string& dir, const VectorConfig& cfg);

using BundleContent = std::variant<ScalarGaugeConfig, VectorConfig>;
BundleContent read_bundle(const std::string& dir);

}  // namespace virial

#endif  // VIRIAL_BUNDLE_HPP_
