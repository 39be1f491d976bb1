#include "virial/bundle.hpp"

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "virial/jsonio.hpp"

static_assert(std::endian::native == std::endian::little,
              "field bundles are little-endian; byte swapping not implemented");

namespace virial {

namespace fs = std::filesystem;

namespace {

void write_raw(const fs::path& path, const void* data, std::size_t bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw BundleError("cannot open " + path.string() + " for write");
  out.write(static_cast<const char*>(data),
            static_cast<std::streamsize>(bytes));
  if (!out) throw BundleError("short write to " + path.string());
}

void read_raw(const fs::path& path, void* data, std::size_t bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError("cannot open " + path.string());
  if (fs::file_size(path) != bytes)
    throw BundleError(path.string() + ": expected " + std::to_string(bytes) +
                      " bytes, found " + std::to_string(fs::file_size(path)));
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (!in) throw BundleError("short read from " + path.string());
}

Json array_entry(const std::string& name, const std::string& file,
                 const std::vector<long long>& shape) {
  Json e = Json::object();
  e.set("name", Json::string(name));
  e.set("file", Json::string(file));
  e.set("dtype", Json::string("f64-le"));
  Json sh = Json::array();
  for (long long d : shape) sh.push(Json::integer(d));
  e.set("shape", std::move(sh));
  return e;
}

Json grid_json(const GridSpec& g) {
  Json j = Json::object();
  j.set("period_t", Json::number(g.period_t));
  j.set("box_l", Json::number(g.box_l));
  j.set("n_t", Json::integer(g.n_t));
  j.set("n_x", Json::integer(g.n_x));
  return j;
}

Json group_json(const GaugeGroup& g) {
  Json j = Json::object();
  j.set("name", Json::string(g.name));
  j.set("coupling", Json::number(g.coupling));
  if (g.name == "u1") {
    j.set("charge", Json::number(g.generators[0].real()));
  } else if (g.name != "su2") {
    j.set("dim_adjoint", Json::integer(g.dim_adjoint));
    j.set("n_rep", Json::integer(g.n_rep));
    Json cs = Json::array();
    for (double v : g.structure) cs.push(Json::number(v));
    j.set("structure_constants", std::move(cs));
    Json gre = Json::array(), gim = Json::array();
    for (const auto& t : g.generators) {
      gre.push(Json::number(t.real()));
      gim.push(Json::number(t.imag()));
    }
    j.set("generators_re", std::move(gre));
    j.set("generators_im", std::move(gim));
  }
  return j;
}

void write_manifest(const fs::path& dir, const Json& manifest) {
  std::ofstream out(dir / "manifest.json");
  if (!out) throw BundleError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << "\n";
}

GridSpec grid_from_json(const nlohmann::json& j) {
  GridSpec g;
  g.period_t = j.at("period_t").get<double>();
  g.box_l = j.at("box_l").get<double>();
  g.n_t = j.at("n_t").get<int>();
  g.n_x = j.at("n_x").get<int>();
  g.validate();
  return g;
}

GaugeGroup group_from_json(const nlohmann::json& j) {
  std::string name = j.at("name").get<std::string>();
  double coupling = j.value("coupling", 1.0);
  if (name == "u1") return GaugeGroup::u1(coupling, j.value("charge", 1.0));
  if (name == "su2") return GaugeGroup::su2(coupling);
  GaugeGroup g;
  g.name = name;
  g.coupling = coupling;
  g.dim_adjoint = j.at("dim_adjoint").get<int>();
  g.n_rep = j.at("n_rep").get<int>();
  g.structure = j.at("structure_constants").get<std::vector<double>>();
  auto re = j.at("generators_re").get<std::vector<double>>();
  auto im = j.at("generators_im").get<std::vector<double>>();
  if (re.size() != im.size())
    throw BundleError("generator re/im arrays differ in size");
  g.generators.resize(re.size());
  for (std::size_t i = 0; i < re.size(); ++i)
    g.generators[i] = {re[i], im[i]};
  g.validate();
  return g;
}

struct ArrayInfo {
  std::string file;
  std::vector<long long> shape;
};

ArrayInfo find_array(const nlohmann::json& manifest, const std::string& name,
                     bool required) {
  for (const auto& e : manifest.at("arrays")) {
    if (e.at("name").get<std::string>() != name) continue;
    if (e.at("dtype").get<std::string>() != "f64-le")
      throw BundleError("array " + name + ": unsupported dtype");
    ArrayInfo info;
    info.file = e.at("file").get<std::string>();
    for (const auto& d : e.at("shape")) info.shape.push_back(d.get<long long>());
    return info;
  }
  if (required) throw BundleError("bundle is missing array '" + name + "'");
  return {};
}

std::size_t shape_count(const std::vector<long long>& shape) {
  std::size_t n = 1;
  for (long long d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

void expect_shape(const std::string& name, const ArrayInfo& info,
                  const std::vector<long long>& want) {
  if (info.shape != want)
    throw BundleError("array " + name + " has unexpected shape");
}

}  // namespace

void write_bundle(const std::string& dir, const ScalarGaugeConfig& cfg) {
  cfg.validate();
  fs::create_directories(dir);
  const long long nt = cfg.grid.n_t, nx = cfg.grid.n_x;
  const long long nr = cfg.group.n_rep, na = cfg.group.dim_adjoint;

  Json manifest = Json::object();
  manifest.set("schema_version", Json::integer(1));
  manifest.set("theory", Json::string("scalar"));
  manifest.set("grid", grid_json(cfg.grid));
  manifest.set("group", group_json(cfg.group));
  Json arrays = Json::array();
  arrays.push(array_entry("phi", "phi.bin", {nt, nx, nx, nx, nr, 2}));
  if (!cfg.a.empty())
    arrays.push(array_entry("a", "a.bin", {4, na, nt, nx, nx, nx}));
  manifest.set("arrays", std::move(arrays));
  write_manifest(dir, manifest);

  write_raw(fs::path(dir) / "phi.bin", cfg.phi.data(),
            cfg.phi.size() * sizeof(std::complex<double>));
  if (!cfg.a.empty())
    write_raw(fs::path(dir) / "a.bin", cfg.a.data(),
              cfg.a.size() * sizeof(double));
}

void write_bundle(const std::string& dir, const VectorConfig& cfg) {
  cfg.validate();
  fs::create_directories(dir);
  const long long nt = cfg.grid.n_t, nx = cfg.grid.n_x;

  Json manifest = Json::object();
  manifest.set("schema_version", Json::integer(1));
  manifest.set("theory", Json::string("vector"));
  manifest.set("grid", grid_json(cfg.grid));
  manifest.set("e_charge", Json::number(cfg.e_charge));
  manifest.set("mass_m", Json::number(cfg.mass_m));
  Json arrays = Json::array();
  arrays.push(array_entry("w", "w.bin", {4, nt, nx, nx, nx, 2}));
  if (!cfg.a.empty())
    arrays.push(array_entry("a", "a.bin", {4, nt, nx, nx, nx}));
  manifest.set("arrays", std::move(arrays));
  write_manifest(dir, manifest);

  write_raw(fs::path(dir) / "w.bin", cfg.w.data(),
            cfg.w.size() * sizeof(std::complex<double>));
  if (!cfg.a.empty())
    write_raw(fs::path(dir) / "a.bin", cfg.a.data(),
              cfg.a.size() * sizeof(double));
}

BundleContent read_bundle(const std::string& dir) {
  fs::path root(dir);
  std::ifstream in(root / "manifest.json");
  if (!in) throw BundleError("no manifest.json in " + dir);
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw BundleError(std::string("manifest parse error: ") + e.what());
  }

  try {
    std::string theory = manifest.at("theory").get<std::string>();
    GridSpec grid = grid_from_json(manifest.at("grid"));
    const long long nt = grid.n_t, nx = grid.n_x;

    if (theory == "scalar") {
      ScalarGaugeConfig cfg;
      cfg.grid = grid;
      cfg.group = group_from_json(manifest.at("group"));
      const long long nr = cfg.group.n_rep, na = cfg.group.dim_adjoint;

      ArrayInfo phi = find_array(manifest, "phi", true);
      expect_shape("phi", phi, {nt, nx, nx, nx, nr, 2});
      cfg.phi.resize(shape_count(phi.shape) / 2);
      read_raw(root / phi.file, cfg.phi.data(),
               cfg.phi.size() * sizeof(std::complex<double>));

      ArrayInfo a = find_array(manifest, "a", false);
      if (!a.file.empty()) {
        expect_shape("a", a, {4, na, nt, nx, nx, nx});
        cfg.a.resize(shape_count(a.shape));
        read_raw(root / a.file, cfg.a.data(), cfg.a.size() * sizeof(double));
      }
      cfg.validate();
      return cfg;
    }
    if (theory == "vector") {
      VectorConfig cfg;
      cfg.grid = grid;
      cfg.e_charge = manifest.at("e_charge").get<double>();
      cfg.mass_m = manifest.at("mass_m").get<double>();

      ArrayInfo w = find_array(manifest, "w", true);
      expect_shape("w", w, {4, nt, nx, nx, nx, 2});
      cfg.w.resize(shape_count(w.shape) / 2);
      read_raw(root / w.file, cfg.w.data(),
               cfg.w.size() * sizeof(std::complex<double>));

      ArrayInfo a = find_array(manifest, "a", false);
      if (!a.file.empty()) {
        expect_shape("a", a, {4, nt, nx, nx, nx});
        cfg.a.resize(shape_count(a.shape));
        read_raw(root / a.file, cfg.a.data(), cfg.a.size() * sizeof(double));
      }
      cfg.validate();
      return cfg;
    }
    throw BundleError("unknown theory '" + theory + "'");
  } catch (const nlohmann::json::exception& e) {
    throw BundleError(std::string("manifest field error: ") + e.what());
  }
}

}  // namespace virial
