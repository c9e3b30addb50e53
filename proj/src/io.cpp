#include "ssw/io.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ssw/errors.hpp"

#ifndef SSW_VERSION
#define SSW_VERSION "0.0.0"
#endif

namespace ssw {

namespace fs = std::filesystem;

Json parse_config(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ConfigParse("configuration is empty");
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigParse(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigParse("configuration must be a JSON object");
  return j;
}

Json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigParse("cannot open configuration '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

FieldSpec family_spec(const std::string& name) {
  if (name == "cubic") return FieldSpec::cubic();
  if (name == "quintic") return FieldSpec::quintic();
  if (name == "cubic-quintic-minus") return FieldSpec::cubic_quintic(-1.0);
  if (name == "cubic-quintic-plus") return FieldSpec::cubic_quintic(1.0);
  throw ConfigParse("unknown family '" + name + "'");
}

double family_default_omega(const std::string& name) {
  family_spec(name);
  return name == "cubic-quintic-minus" ? 0.2 : 1.0;
}

double get_number(const Json& c, const std::string& key, double fallback) {
  if (!c.contains(key)) return fallback;
  if (!c[key].is_number()) throw ConfigParse("'" + key + "' must be a number");
  return c[key].get<double>();
}

int get_int(const Json& c, const std::string& key, int fallback) {
  if (!c.contains(key)) return fallback;
  if (!c[key].is_number_integer()) throw ConfigParse("'" + key + "' must be an integer");
  return c[key].get<int>();
}

bool get_bool(const Json& c, const std::string& key, bool fallback) {
  if (!c.contains(key)) return fallback;
  if (!c[key].is_boolean()) throw ConfigParse("'" + key + "' must be a boolean");
  return c[key].get<bool>();
}

std::string get_string(const Json& c, const std::string& key, const std::string& fallback) {
  if (!c.contains(key)) return fallback;
  if (!c[key].is_string()) throw ConfigParse("'" + key + "' must be a string");
  return c[key].get<std::string>();
}

static Json get_object(const Json& c, const std::string& key) {
  if (!c.contains(key)) return Json::object();
  if (!c[key].is_object()) throw ConfigParse("'" + key + "' must be an object");
  return c[key];
}

static void reject_unknown(const Json& c, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = c.begin(); it != c.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigParse("unknown key '" + it.key() + "' in " + where);
}

FieldSpec field_from_config(const Json& c) {
  const bool has_f = c.contains("F"), has_family = c.contains("family");
  if (has_f == has_family) throw ConfigParse("exactly one of 'F' and 'family' is required");
  if (has_family) return family_spec(get_string(c, "family", ""));
  try {
    return FieldSpec::parse(get_string(c, "F", ""));
  } catch (const ConfigParse&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigParse(std::string("invalid nonlinearity: ") + e.what());
  }
}

SimConfig sim_config_from_json(const Json& c) {
  reject_unknown(c,
                 {"F", "family", "omega", "soliton", "p0", "perturbation", "grid", "dt", "t_end", "sponge",
                  "nonlinear", "sample_every", "sample_times", "sample_geometric", "fit_modulation", "tolerances"},
                 "simulation config");
  SimConfig s;
  s.spec = field_from_config(c);
  const std::string family = get_string(c, "family", "");
  s.omega0 = get_number(c, "omega", family.empty() ? 1.0 : family_default_omega(family));
  s.soliton = get_bool(c, "soliton", true);
  s.p0 = get_number(c, "p0", 0.0);

  const Json pert = get_object(c, "perturbation");
  reject_unknown(pert, {"kind", "epsilon", "width", "center", "kick"}, "perturbation");
  s.perturbation = get_string(pert, "kind", pert.empty() ? "none" : "gaussian");
  s.epsilon = get_number(pert, "epsilon", 0.0);
  s.perturbation_width = get_number(pert, "width", 1.0);
  s.perturbation_center = get_number(pert, "center", 0.0);
  s.perturbation_kick = get_number(pert, "kick", 0.0);

  const Json grid = get_object(c, "grid");
  reject_unknown(grid, {"x_max", "n"}, "grid");
  const double x_max = get_number(grid, "x_max", s.soliton ? 40.0 / std::sqrt(s.omega0) : 200.0);
  const int n = get_int(grid, "n", 4096);
  if (!(x_max > 0.0) || n < 8 || !is_power_of_two(n)) throw ConfigParse("grid needs x_max > 0 and n a power of two");
  s.grid = Grid1D(x_max, n);

  s.dt = get_number(c, "dt", 5e-3);
  s.t_end = get_number(c, "t_end", 1.0);
  const Json sponge = get_object(c, "sponge");
  reject_unknown(sponge, {"width", "strength"}, "sponge");
  s.sponge_width = get_number(sponge, "width", 0.0);
  s.sponge_strength = get_number(sponge, "strength", s.sponge_width > 0.0 ? 1.0 : 0.0);
  s.nonlinear = get_bool(c, "nonlinear", true);
  s.sample_every = get_int(c, "sample_every", 0);
  if (c.contains("sample_times")) {
    if (!c["sample_times"].is_array()) throw ConfigParse("'sample_times' must be an array");
    for (const Json& t : c["sample_times"]) {
      if (!t.is_number()) throw ConfigParse("'sample_times' entries must be numbers");
      s.sample_times.push_back(t.get<double>());
    }
  }
  if (c.contains("sample_geometric")) {
    const Json g = get_object(c, "sample_geometric");
    reject_unknown(g, {"t0", "t1", "count"}, "sample_geometric");
    const double t0 = get_number(g, "t0", 1.0), t1 = get_number(g, "t1", s.t_end);
    const int count = get_int(g, "count", 20);
    if (!(t0 > 0.0) || !(t1 > t0) || count < 2) throw ConfigParse("sample_geometric needs 0 < t0 < t1, count >= 2");
    for (int k = 0; k < count; ++k) s.sample_times.push_back(t0 * std::pow(t1 / t0, double(k) / (count - 1)));
  }
  s.fit_modulation = get_bool(c, "fit_modulation", s.soliton);
  const Json tol = get_object(c, "tolerances");
  reject_unknown(tol, {"mass", "hamiltonian", "blowup"}, "tolerances");
  s.mass_tolerance = get_number(tol, "mass", s.mass_tolerance);
  s.hamiltonian_tolerance = get_number(tol, "hamiltonian", s.hamiltonian_tolerance);
  s.blowup_factor = get_number(tol, "blowup", s.blowup_factor);
  s.keep_fields = true;
  s.validate();
  return s;
}

Json to_json(const Grid1D& g) { return Json{{"x_max", g.x_max}, {"n", g.n}, {"dx", g.dx}}; }

Json to_json(const SimConfig& s) {
  Json j;
  j["F"] = s.spec.to_string();
  j["omega"] = s.omega0;
  j["soliton"] = s.soliton;
  j["p0"] = s.p0;
  j["perturbation"] = {{"kind", s.perturbation},
                       {"epsilon", s.epsilon},
                       {"width", s.perturbation_width},
                       {"center", s.perturbation_center},
                       {"kick", s.perturbation_kick}};
  j["grid"] = {{"x_max", s.grid.x_max}, {"n", s.grid.n}};
  j["dt"] = s.dt;
  j["t_end"] = s.t_end;
  j["sponge"] = {{"width", s.sponge_width}, {"strength", s.sponge_strength}};
  j["nonlinear"] = s.nonlinear;
  j["sample_every"] = s.sample_every;
  j["sample_times"] = s.sample_times;
  j["fit_modulation"] = s.fit_modulation;
  j["tolerances"] = {{"mass", s.mass_tolerance}, {"hamiltonian", s.hamiltonian_tolerance}, {"blowup", s.blowup_factor}};
  return j;
}

std::uint64_t content_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const Json& config) { return hash_hex(content_hash(config.dump())); }

static std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigParse("cannot write '" + path + "'");
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw ConfigParse("CSV row width differs from header in '" + path + "'");
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
    out << '\n';
  }
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParse("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigParse("empty CSV '" + path + "'");
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream rs(line);
    for (std::string cell; std::getline(rs, cell, ',');) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigParse("non-numeric CSV cell '" + cell + "' in '" + path + "'");
      }
    }
    if (row.size() != t.header.size()) throw ConfigParse("ragged CSV '" + path + "'");
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T take(std::istream& in, const std::string& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw ConfigParse("truncated binary file '" + path + "'");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr char kSpectrumMagic[8] = {'S', 'S', 'W', 'S', 'P', 'E', 'C', '1'};
constexpr char kFieldMagic[8] = {'S', 'S', 'W', 'F', 'I', 'E', 'L', 'D'};
constexpr std::uint32_t kFormatVersion = 1;

void check_magic(std::istream& in, const char (&magic)[8], const std::string& path) {
  char buf[8];
  if (!in.read(buf, 8) || std::memcmp(buf, magic, 8) != 0) throw ConfigParse("bad magic in '" + path + "'");
  if (take<std::uint32_t>(in, path) != kFormatVersion) throw ConfigParse("unsupported version in '" + path + "'");
  take<std::uint32_t>(in, path);
}

void write_field(const std::string& path, double time, const Grid1D& grid, const CVec& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigParse("cannot write '" + path + "'");
  out.write(kFieldMagic, 8);
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(v.size()));
  put<double>(out, time);
  put<double>(out, grid.x_max);
  for (Eigen::Index i = 0; i < v.size(); ++i) put<double>(out, v[i].real()), put<double>(out, v[i].imag());
}

CVec read_field(const std::string& path, double& time, Grid1D& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigParse("cannot open '" + path + "'");
  check_magic(in, kFieldMagic, path);
  const auto n = take<std::uint64_t>(in, path);
  time = take<double>(in, path);
  const double x_max = take<double>(in, path);
  grid = Grid1D(x_max, static_cast<int>(n));
  CVec v(static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    const double re = take<double>(in, path);
    v[static_cast<Eigen::Index>(i)] = cplx(re, take<double>(in, path));
  }
  return v;
}

std::string indexed(const std::string& stem, std::size_t k, const std::string& ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu%s", stem.c_str(), k, ext.c_str());
  return buf;
}

}  // namespace

void write_spectrum_snapshot(const std::string& path, const SpectrumSnapshot& snap) {
  const DistortedSpectrum& s = snap.spectrum;
  const std::size_t n = s.xi.size();
  if (s.weights.size() != n || static_cast<std::size_t>(s.f_plus.size()) != n ||
      static_cast<std::size_t>(s.f_minus.size()) != n)
    throw ConfigParse("inconsistent spectrum sizes for '" + path + "'");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigParse("cannot write '" + path + "'");
  out.write(kSpectrumMagic, 8);
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, n);
  put<double>(out, snap.time);
  put<double>(out, snap.omega);
  put<double>(out, snap.p);
  put<double>(out, snap.grid.x_max);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(snap.grid.n));
  for (double x : s.xi) put<double>(out, x);
  for (double w : s.weights) put<double>(out, w);
  for (std::size_t j = 0; j < n; ++j) put<double>(out, s.f_plus[j].real()), put<double>(out, s.f_plus[j].imag());
  for (std::size_t j = 0; j < n; ++j) put<double>(out, s.f_minus[j].real()), put<double>(out, s.f_minus[j].imag());
}

SpectrumSnapshot read_spectrum_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigParse("cannot open '" + path + "'");
  check_magic(in, kSpectrumMagic, path);
  SpectrumSnapshot snap;
  const auto n = static_cast<std::size_t>(take<std::uint64_t>(in, path));
  snap.time = take<double>(in, path);
  snap.omega = take<double>(in, path);
  snap.p = take<double>(in, path);
  const double x_max = take<double>(in, path);
  const auto grid_n = take<std::uint64_t>(in, path);
  if (grid_n > 0) snap.grid = Grid1D(x_max, static_cast<int>(grid_n));
  DistortedSpectrum& s = snap.spectrum;
  s.xi.resize(n);
  s.weights.resize(n);
  s.f_plus.resize(static_cast<Eigen::Index>(n));
  s.f_minus.resize(static_cast<Eigen::Index>(n));
  for (auto& x : s.xi) x = take<double>(in, path);
  for (auto& w : s.weights) w = take<double>(in, path);
  for (std::size_t j = 0; j < n; ++j) {
    const double re = take<double>(in, path);
    s.f_plus[j] = cplx(re, take<double>(in, path));
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double re = take<double>(in, path);
    s.f_minus[j] = cplx(re, take<double>(in, path));
  }
  s.update_zero_values();
  return snap;
}

void write_profile_csv(const std::string& path, const SolitonProfile& p) {
  std::vector<std::vector<double>> rows;
  rows.reserve(p.grid.n);
  for (int i = 0; i < p.grid.n; ++i) rows.push_back({p.grid.x(i), p.phi[i], p.dphi[i]});
  write_csv(path, {"x", "phi", "dphi"}, rows);
}

void write_scattering_csv(const std::string& path, const ScatteringData& d) {
  std::vector<std::string> header = {"xi"};
  for (const char* m : {"D", "A", "B"})
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b)
        for (const char* part : {"re", "im"})
          header.push_back(std::string(m) + std::to_string(a) + std::to_string(b) + "_" + part);
  for (const char* c : {"s_re", "s_im", "r_re", "r_im", "unitarity_defect", "constancy"}) header.push_back(c);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < d.xi_grid.size(); ++k) {
    std::vector<double> row = {d.xi_grid[k]};
    if (k < d.matrices.size()) {
      const ScatteringMatrices& m = d.matrices[k];
      for (const Mat2c* mat : {&m.D, &m.A, &m.B})
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) row.push_back((*mat)(a, b).real()), row.push_back((*mat)(a, b).imag());
    } else {
      row.insert(row.end(), 24, std::nan(""));
    }
    row.push_back(d.s[k].real());
    row.push_back(d.s[k].imag());
    row.push_back(d.r[k].real());
    row.push_back(d.r[k].imag());
    row.push_back(std::abs(std::norm(d.r[k]) + std::norm(d.s[k]) - 1.0));
    row.push_back(d.constancy[k]);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

Json to_json(const ResonanceReport& r) {
  return Json{{"det_D0_extrapolated", {r.det_D0_extrapolated.real(), r.det_D0_extrapolated.imag()}},
              {"min_singular_value_D", r.min_singular_value_D},
              {"extrapolated_singular_value", r.extrapolated_singular_value},
              {"threshold", r.threshold},
              {"resonant", r.resonant},
              {"xi_samples", r.xi_samples},
              {"singular_values", r.singular_values}};
}

void write_record(const std::string& dir, const SimRecord& r) {
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "config.json", std::ios::binary);
    out << to_json(r.config).dump(2) << '\n';
  }
  std::vector<std::vector<double>> series, modulation;
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    series.push_back({r.times[k], r.mass[k], r.hamiltonian[k], r.u_sup[k], r.u_local[k], r.pythagoras_defect[k]});
    if (k < r.modulation.size()) {
      const ModulationState& m = r.modulation[k];
      double residual = 0;
      for (double q : m.residuals) residual = std::max(residual, std::abs(q));
      std::vector<double> row = {r.times[k], m.gamma, m.p, m.y, m.omega};
      for (int j = 0; j < 4; ++j) row.push_back(k < r.discrete.size() ? std::abs(r.discrete[k][j]) : 0.0);
      row.push_back(residual);
      modulation.push_back(std::move(row));
    }
  }
  write_csv((fs::path(dir) / "series.csv").string(),
            {"t", "mass", "hamiltonian", "u_sup", "u_local", "pythagoras_defect"}, series);
  if (!modulation.empty())
    write_csv((fs::path(dir) / "modulation.csv").string(),
              {"t", "gamma", "p", "y", "omega", "a0", "a1", "a2", "a3", "residual"}, modulation);
  if (!r.fields.empty()) {
    fs::create_directories(fs::path(dir) / "fields");
    for (std::size_t k = 0; k < r.fields.size(); ++k)
      write_field((fs::path(dir) / "fields" / indexed("field", k, ".bin")).string(), r.times[k], r.config.grid,
                  r.fields[k]);
  }
  if (!r.spectra.empty()) {
    fs::create_directories(fs::path(dir) / "spectra");
    const ModulationState last = r.modulation.empty() ? ModulationState{} : r.modulation.back();
    for (std::size_t k = 0; k < r.spectra.size(); ++k) {
      SpectrumSnapshot snap{r.times[k], last.omega, last.p, r.config.grid, r.spectra[k]};
      write_spectrum_snapshot((fs::path(dir) / "spectra" / indexed("snapshot", k, ".bin")).string(), snap);
    }
  }
}

SimRecord read_record(const std::string& dir) {
  SimRecord r;
  r.config = sim_config_from_json(load_config((fs::path(dir) / "config.json").string()));
  const CsvTable series = read_csv((fs::path(dir) / "series.csv").string());
  for (const auto& row : series.rows) {
    r.times.push_back(row[0]);
    r.mass.push_back(row[1]);
    r.hamiltonian.push_back(row[2]);
    r.u_sup.push_back(row[3]);
    r.u_local.push_back(row[4]);
    r.pythagoras_defect.push_back(row[5]);
  }
  const fs::path mod_path = fs::path(dir) / "modulation.csv";
  if (fs::exists(mod_path)) {
    for (const auto& row : read_csv(mod_path.string()).rows) {
      ModulationState m;
      m.gamma = row[1];
      m.p = row[2];
      m.y = row[3];
      m.omega = row[4];
      m.residuals[0] = row[9];
      r.modulation.push_back(m);
    }
  }
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    const fs::path p = fs::path(dir) / "fields" / indexed("field", k, ".bin");
    if (!fs::exists(p)) throw ConfigParse("record is missing " + p.string());
    double t = 0;
    Grid1D g;
    r.fields.push_back(read_field(p.string(), t, g));
    if (g.n != r.config.grid.n || g.x_max != r.config.grid.x_max) throw ConfigParse("field grid differs from config");
  }
  return r;
}

void RunManifest::take_inventory(const std::string& dir) {
  files.clear();
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).generic_string();
    if (rel == "manifest.json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files.push_back({rel, e.file_size(), hash_hex(content_hash(ss.str()))});
  }
  std::sort(files.begin(), files.end(), [](const FileEntry& a, const FileEntry& b) { return a.name < b.name; });
}

Json RunManifest::to_json() const {
  Json inv = Json::array();
  for (const FileEntry& f : files) inv.push_back({{"name", f.name}, {"bytes", f.bytes}, {"hash", f.hash}});
  return Json{{"subcommand", subcommand}, {"config_hash", config_hash}, {"code_version", code_version},
              {"started", started},       {"finished", finished},       {"field", field},
              {"grids", grids},           {"config", config},           {"checks", checks},
              {"passed", passed},         {"files", inv}};
}

void RunManifest::write(const std::string& dir) const {
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!out) throw ConfigParse("cannot write manifest in '" + dir + "'");
  out << to_json().dump(2) << '\n';
}

std::string code_version() { return SSW_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ssw
