#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssw/dft.hpp"
#include "ssw/evolution.hpp"
#include "ssw/profiles.hpp"
#include "ssw/scattering.hpp"

namespace ssw {

using Json = nlohmann::json;

// Parses a JSON object from a file; empty, missing or malformed input raises ConfigParse.
Json load_config(const std::string& path);
Json parse_config(const std::string& text);

// Named families: cubic, quintic, cubic-quintic-minus, cubic-quintic-plus.
FieldSpec family_spec(const std::string& name);
double family_default_omega(const std::string& name);
// Reads "F" (polynomial text) or "family"; ConfigParse if neither or both are present.
FieldSpec field_from_config(const Json& config);

// Typed accessors raising ConfigParse on type mismatch.
double get_number(const Json& config, const std::string& key, double fallback);
int get_int(const Json& config, const std::string& key, int fallback);
bool get_bool(const Json& config, const std::string& key, bool fallback);
std::string get_string(const Json& config, const std::string& key, const std::string& fallback);

// Keys: F | family, omega, soliton, p0, perturbation{kind, epsilon, width, center, kick}, grid{x_max, n}, dt,
// t_end, sponge{width, strength}, nonlinear, sample_every, sample_times | sample_geometric{t0, t1, count},
// fit_modulation, tolerances{mass, hamiltonian, blowup}.
SimConfig sim_config_from_json(const Json& config);
Json to_json(const SimConfig& config);
Json to_json(const Grid1D& grid);

// FNV-1a 64 of the canonical dump (sorted keys, no whitespace).
std::uint64_t content_hash(const std::string& bytes);
std::string hash_hex(std::uint64_t h);
std::string config_hash(const Json& config);

// CSV with a header row; numbers printed with 17 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

// Little-endian spectrum snapshot:
//   magic "SSWSPEC1", uint32 version, uint32 reserved, uint64 count, float64 time, float64 omega, float64 p,
//   float64 x_max, uint64 grid n, float64 xi[count], float64 weight[count],
//   float64 (re, im) f_plus[count], float64 (re, im) f_minus[count].
struct SpectrumSnapshot {
  double time = 0.0;
  double omega = 0.0;
  double p = 0.0;
  Grid1D grid;
  DistortedSpectrum spectrum;
};
void write_spectrum_snapshot(const std::string& path, const SpectrumSnapshot& snap);
SpectrumSnapshot read_spectrum_snapshot(const std::string& path);

void write_profile_csv(const std::string& path, const SolitonProfile& profile);
void write_scattering_csv(const std::string& path, const ScatteringData& data);
Json to_json(const ResonanceReport& report);

// series.csv, modulation.csv, spectra/snapshot_NNNN.bin.
void write_record(const std::string& dir, const SimRecord& record);
// Reads the fields needed by the analysis back from a record directory (fields must have been written).
SimRecord read_record(const std::string& dir);

struct FileEntry {
  std::string name;
  std::uintmax_t bytes = 0;
  std::string hash;
};

struct RunManifest {
  std::string subcommand;
  std::string config_hash;
  std::string code_version;
  std::string started, finished;  // UTC, ISO 8601
  std::string field;
  Json grids = Json::array();
  Json config = Json::object();
  Json checks = Json::object();
  bool passed = true;
  std::vector<FileEntry> files;

  // Lists every regular file below dir except the manifest itself, sorted by path.
  void take_inventory(const std::string& dir);
  Json to_json() const;
  void write(const std::string& dir) const;  // dir/manifest.json
};

std::string code_version();
std::string utc_timestamp();

}  // namespace ssw
