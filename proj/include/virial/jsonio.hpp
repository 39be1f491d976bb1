#ifndef VIRIAL_JSONIO_HPP_
#define VIRIAL_JSONIO_HPP_

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace virial {

// Minimal ordered JSON value for report output.  All floating-point
// numbers are emitted with 17 significant digits so that parsing the
// output reproduces the exact double.
class Json {
 public:
  static Json object();
  static Json array();
  static Json number(double v);
  static Json integer(long long v);
  static Json boolean(bool v);
  static Json string(std::string v);
  static Json null();

  Json& set(const std::string& key, Json v);  // object members, in order
  Json& push(Json v);                         // array elements

  // indent == 0: compact single line; indent > 0: pretty-printed
  std::string dump(int indent = 0) const;

 private:
  enum class Kind { Null, Bool, Int, Double, String, Array, Object };
  Kind kind_ = Kind::Null;
  bool bool_ = false;
  long long int_ = 0;
  double double_ = 0.0;
  std::string string_;
  std::vector<Json> items_;
  std::vector<std::pair<std::string, Json>> members_;

  void write(std::string& out, int indent, int depth) const;
};

std::string format_g17(double v);

}  // namespace virial

#endif  // VIRIAL_JSONIO_HPP_
