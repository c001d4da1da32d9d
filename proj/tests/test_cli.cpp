#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "nuccr/scan.hpp"

namespace {

struct CliRun {
  int code;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(NUCCR_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::filesystem::path temp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Cli, ScanWritesCsvAndSummary) {
  const auto path = temp("nuccr_cli_db.csv");
  const CliRun r = run_cli("scan --preset daya-bay --picture wave-packet -o " + path.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(r.out, "min survival probability"));
  EXPECT_TRUE(contains(r.out, "asymptotic mutual information"));
  const nuccr::CsvData d = nuccr::read_csv(path.string());
  EXPECT_EQ(d.rows.size(), 2000u);
  EXPECT_TRUE(contains(d.comments.front(), "scan=daya-bay"));
  std::filesystem::remove(path);
}

TEST(Cli, PlaneWaveScanSatisfiesComplementarity) {
  const auto path = temp("nuccr_cli_minos.csv");
  const CliRun r = run_cli("scan --preset minos --picture plane-wave -o " + path.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const nuccr::CsvData d = nuccr::read_csv(path.string());
  ASSERT_FALSE(d.rows.empty());
  for (const auto& row : d.rows) EXPECT_LT(std::abs(row[12]), 1e-10);
  std::filesystem::remove(path);
}

TEST(Cli, ScanToStdoutKeepsCsvClean) {
  const auto cfg = temp("nuccr_cli_small.conf");
  {
    std::ofstream out(cfg);
    out << "preset = kamland\ngrid_points = 3\n";
  }
  const std::string cmd = std::string(NUCCR_CLI_PATH) + " scan --config " + cfg.string() + " --no-metadata -o - 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  EXPECT_EQ(WEXITSTATUS(pclose(pipe)), 0);
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 4);
  EXPECT_EQ(out.rfind("x_km,", 0), 0u);
  std::filesystem::remove(cfg);
}

TEST(Cli, UnknownPresetListsValidOnes) {
  const CliRun r = run_cli("scan --preset t2k -o -");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "daya-bay, kamland, kamland-alt, minos")) << r.out;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli("").code, 1);
  EXPECT_EQ(run_cli("frobnicate").code, 1);
  EXPECT_EQ(run_cli("scan").code, 1);
  EXPECT_EQ(run_cli("scan --preset minos --config x.conf").code, 1);
  EXPECT_EQ(run_cli("scan --preset minos --picture particle").code, 1);
  EXPECT_EQ(run_cli("verify --trials 0").code, 1);
  EXPECT_EQ(run_cli("verify --trials -3").code, 1);
  EXPECT_EQ(run_cli("--help").code, 0);
}

TEST(Cli, ConfigErrorNamesField) {
  const auto cfg = temp("nuccr_cli_bad.conf");
  {
    std::ofstream out(cfg);
    out << "preset = daya-bay\nenergy_mev = -1\n";
  }
  const CliRun r = run_cli("scan --config " + cfg.string() + " -o -");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "energy_mev")) << r.out;
  std::filesystem::remove(cfg);
}

TEST(Cli, VerifyPassesAndIsReproducible) {
  const CliRun a = run_cli("verify --trials 1000 --seed 7");
  ASSERT_EQ(a.code, 0) << a.out;
  EXPECT_FALSE(contains(a.out, "FAIL"));
  EXPECT_TRUE(contains(a.out, "PASS pure-state HS complementarity"));
  EXPECT_TRUE(contains(a.out, "INFO measured NAQC"));
  const CliRun b = run_cli("verify --trials 1000 --seed 7");
  EXPECT_EQ(a.out, b.out);
  const CliRun c = run_cli("verify --trials 50 --seed 8");
  EXPECT_EQ(c.code, 0);
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, PresetsPrintsPublishedValues) {
  const CliRun r = run_cli("presets");
  ASSERT_EQ(r.code, 0);
  for (const char* s : {"daya-bay", "kamland-alt", "minos", "sin^2(2 theta_13) = 0.084", "tan^2(2 theta_12) = 0.47",
                        "L = 735 km", "assumed default"})
    EXPECT_TRUE(contains(r.out, s)) << s;
}

TEST(Cli, BoundConverges) {
  const CliRun r = run_cli("bound");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(r.out, "resolution 64: 2.232023"));
  EXPECT_TRUE(contains(r.out, "resolution 128: 2.232023"));
  EXPECT_TRUE(contains(r.out, "converged true"));
  const CliRun z = run_cli("bound --incoherent-only");
  ASSERT_EQ(z.code, 0);
  EXPECT_TRUE(contains(z.out, "resolution 64: 0.000000"));
}
