#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ssw/io.hpp"

using namespace ssw;
namespace fs = std::filesystem;

namespace {

fs::path workdir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ssw_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SSW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST(Cli, EmptyConfigIsParseError) {
  const fs::path dir = workdir("empty");
  write_text(dir / "empty.json", "");
  EXPECT_EQ(run_cli("profile --config " + (dir / "empty.json").string() + " --out " + (dir / "o").string()), 2);
  EXPECT_EQ(run_cli("simulate --config " + (dir / "empty.json").string() + " --out " + (dir / "o").string()), 2);
}

TEST(Cli, MalformedInputIsParseError) {
  const fs::path dir = workdir("malformed");
  write_text(dir / "bad.json", "{\"family\": \"cubic\",");
  EXPECT_EQ(run_cli("profile --config " + (dir / "bad.json").string() + " --out " + (dir / "o").string()), 2);
  write_text(dir / "typo.json", R"({"family": "cubic", "t_ned": 1})");
  EXPECT_EQ(run_cli("simulate --config " + (dir / "typo.json").string() + " --out " + (dir / "o").string()), 2);
  EXPECT_EQ(run_cli("profile --family sextic --out " + (dir / "o").string()), 2);
  EXPECT_EQ(run_cli("no-such-subcommand"), 2);
  EXPECT_EQ(run_cli("profile --threads 0 --family cubic"), 2);
}

TEST(Cli, ScatteringOfCubicReportsResonance) {
  const fs::path dir = workdir("scattering");
  ASSERT_EQ(run_cli("scattering --F \"z^2\" --omega 1 --threads 2 --out " + dir.string()), 0);
  const Json rep = load_config((dir / "resonance.json").string());
  EXPECT_TRUE(rep["resonant"].get<bool>());
  const CsvTable t = read_csv((dir / "scattering.csv").string());
  ASSERT_EQ(t.header.size(), 31u);
  EXPECT_EQ(t.header[0], "xi");
  EXPECT_EQ(t.header[1], "D11_re");
  EXPECT_EQ(t.header[25], "s_re");
  EXPECT_EQ(t.rows.size(), 160u);
  for (const auto& row : t.rows) {
    const double s2 = row[25] * row[25] + row[26] * row[26], r2 = row[27] * row[27] + row[28] * row[28];
    EXPECT_NEAR(s2 + r2, 1.0, 1e-5);
  }
}

TEST(Cli, ManifestListsEveryOutput) {
  const fs::path dir = workdir("manifest");
  ASSERT_EQ(run_cli("spectrum --family cubic-quintic-plus --omega 1 --out " + dir.string()), 3)
      << "the default 4096-point grid leaves kernel residuals above 1e-6";
  ASSERT_EQ(run_cli("spectrum --family cubic-quintic-plus --omega 1 --tol-scale 10 --out " + dir.string()), 0);
  const Json m = load_config((dir / "manifest.json").string());
  EXPECT_EQ(m["subcommand"], "spectrum");
  EXPECT_EQ(m["config_hash"], config_hash(m["config"]));
  EXPECT_TRUE(m["passed"].get<bool>());
  std::vector<std::string> names;
  for (const auto& f : m["files"]) {
    names.push_back(f["name"]);
    EXPECT_EQ(f["hash"], hash_hex(content_hash(slurp(dir / f["name"].get<std::string>()))));
  }
  EXPECT_EQ(names, (std::vector<std::string>{"potentials.csv", "spectrum.json"}));
  const Json s = load_config((dir / "spectrum.json").string());
  EXPECT_EQ(s["internal_modes"].size(), 2u);
}

TEST(Cli, OutputsAreBitReproducible) {
  const fs::path a = workdir("repro_a"), b = workdir("repro_b");
  ASSERT_EQ(run_cli("profile --family cubic-quintic-minus --out " + a.string()), 0);
  ASSERT_EQ(run_cli("profile --family cubic-quintic-minus --threads 3 --out " + b.string()), 0);
  EXPECT_EQ(slurp(a / "profile.csv"), slurp(b / "profile.csv"));
  EXPECT_EQ(slurp(a / "profile.json"), slurp(b / "profile.json"));
  const Json ma = load_config((a / "manifest.json").string()), mb = load_config((b / "manifest.json").string());
  EXPECT_EQ(ma["config_hash"], mb["config_hash"]);
  EXPECT_EQ(ma["files"], mb["files"]);
}

TEST(Cli, VerifyAllCubicQuinticMinus) {
  const fs::path dir = workdir("verify");
  ASSERT_EQ(run_cli("verify-all --family cubic-quintic-minus --threads 4 --out " + dir.string()), 0);
  const Json rep = load_config((dir / "report.json").string());
  EXPECT_TRUE(rep["passed"].get<bool>());
  for (const char* name : {"profile.residual", "spectrum.kernel_relations", "scattering.unitarity",
                           "scattering.non_resonant", "dft.round_trip", "modulation.round_trip",
                           "evolution.hamiltonian_drift", "asymptotics.hessian_determinant"})
    EXPECT_TRUE(rep["checks"].contains(name)) << name;
}

TEST(Cli, SimulateThenAnalyze) {
  const fs::path dir = workdir("simulate");
  write_text(dir / "sim.json", R"({
    "family": "cubic-quintic-minus",
    "perturbation": {"kind": "gaussian", "epsilon": 0.01, "width": 2, "center": 1},
    "grid": {"x_max": 100, "n": 2048}, "dt": 0.01, "t_end": 4, "sample_every": 100
  })");
  ASSERT_EQ(run_cli("simulate --config " + (dir / "sim.json").string() + " --out " + (dir / "rec").string()), 0);
  const CsvTable series = read_csv((dir / "rec" / "series.csv").string());
  ASSERT_EQ(series.rows.size(), 5u);
  EXPECT_EQ(series.header, (std::vector<std::string>{"t", "mass", "hamiltonian", "u_sup", "u_local",
                                                      "pythagoras_defect"}));
  EXPECT_NEAR(series.rows.back()[1], series.rows.front()[1], 1e-10 * series.rows.front()[1]);
  const CsvTable mod = read_csv((dir / "rec" / "modulation.csv").string());
  EXPECT_EQ(mod.header.size(), 10u);

  write_text(dir / "an.json", R"({"xi_max": 3, "xi_step": 0.05, "t0": 1})");
  ASSERT_EQ(run_cli("analyze --record " + (dir / "rec").string() + " --config " + (dir / "an.json").string() +
                    " --out " + (dir / "an").string()),
            0);
  const SpectrumSnapshot snap = read_spectrum_snapshot((dir / "an" / "spectra" / "snapshot_0004.bin").string());
  EXPECT_DOUBLE_EQ(snap.time, 4.0);
  EXPECT_EQ(snap.grid.n, 2048);
  EXPECT_GT(snap.spectrum.sup_norm(), 0.0);
  EXPECT_TRUE(fs::exists(dir / "an" / "trapped_norms.csv"));
  EXPECT_TRUE(fs::exists(dir / "an" / "manifest.json"));
}

TEST(Cli, ConservationFailureIsNamed) {
  const fs::path dir = workdir("invariant");
  write_text(dir / "sim.json", R"({
    "family": "cubic", "perturbation": {"epsilon": 0.05, "width": 1},
    "grid": {"x_max": 40, "n": 512}, "dt": 0.05, "t_end": 2,
    "tolerances": {"hamiltonian": 1e-12}
  })");
  EXPECT_EQ(run_cli("simulate --config " + (dir / "sim.json").string() + " --out " + (dir / "o").string()), 3);
}
