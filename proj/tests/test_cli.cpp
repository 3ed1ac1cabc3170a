// End-to-end tests for the egoe command-line tool: subcommand outputs, JSON
// summaries, determinism across worker counts, ingest cross-checks against
// direct library calls, and the exit-code contract.

#include <sys/stat.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "egoe/ensemble.hpp"
#include "egoe/fock.hpp"
#include "egoe/io.hpp"
#include "egoe/observables.hpp"
#include "egoe/rng.hpp"
#include "egoe/spectra.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kDir = "/tmp/egoe_cli_tests";

struct DirSetup {
  DirSetup() {
    std::error_code ec;
    fs::remove_all(kDir, ec);
    fs::create_directories(kDir);
  }
};
const DirSetup dir_setup;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const std::string out_path = kDir + "/cli_stdout_" + std::to_string(counter) + ".txt";
  const std::string err_path = kDir + "/cli_stderr_" + std::to_string(counter) + ".txt";
  ++counter;
  std::string cmd;
  if (!env_prefix.empty()) cmd += env_prefix + " ";
  cmd += std::string(EGOE_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
  const int raw = std::system(cmd.c_str());
  CliResult result;
  if (raw >= 0 && WIFEXITED(raw)) result.code = WEXITSTATUS(raw);
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}

// Small, fast base run: N=7, m=3 (d=35), two lambdas an order of magnitude
// apart so weak- and strong-coupling behaviour are both exercised.
std::string base_config(const std::string& out_dir, const std::string& extra = "") {
  std::string text =
      "[space]\n"
      "n = 7\n"
      "m = 3\n"
      "\n"
      "[ensemble]\n"
      "v = 1.0\n"
      "members = 3\n"
      "master_seed = 42\n"
      "lambda = 0.05,0.5\n"
      "\n"
      "[observe]\n"
      "bins = 21\n"
      "e_lo = -3.0\n"
      "e_hi = 3.0\n"
      "k_halfwidth = 0.6\n"
      "curve_points = 21\n"
      "curve_window = 0.5\n"
      "\n"
      "[run]\n"
      "out = " + out_dir + "\n";
  if (!extra.empty()) text += "\n" + extra + "\n";
  return text;
}

std::string write_config(const std::string& name, const std::string& text) {
  const std::string path = kDir + "/" + name;
  std::ofstream out(path);
  out << text;
  return path;
}

json load_json(const std::string& path) { return json::parse(read_file(path)); }

}  // namespace

TEST_CASE("cli: observe writes histograms, curves, and a JSON summary") {
  const std::string out_dir = kDir + "/observe";
  const std::string cfg = write_config("observe.ini", base_config(out_dir));
  const auto result = run_cli("observe --config " + cfg);
  CAPTURE(result.err);
  REQUIRE(result.code == 0);
  CHECK(result.out.find("observe: wrote curves for 2 lambda(s)") != std::string::npos);

  for (const char* name : {"strength_00.csv", "strength_01.csv", "xi2_curve_00.csv",
                           "xi2_curve_01.csv", "sinfo_curve_00.csv", "sinfo_curve_01.csv",
                           "observe_summary.json"}) {
    CAPTURE(name);
    CHECK(fs::exists(fs::path(out_dir) / name));
  }

  const json summary = load_json(out_dir + "/observe_summary.json");
  CHECK(summary["master_seed"].get<std::uint64_t>() == 42);
  const std::string hash = summary["config_hash"].get<std::string>();
  CHECK(hash.size() == 16);
  CHECK(summary["config"]["space.n"].get<std::string>() == "7");
  CHECK(summary["config"]["space.m"].get<std::string>() == "3");
  CHECK(summary["config"]["ensemble.lambda"].get<std::string>() == "0.05,0.5");
  REQUIRE(summary["lambdas"].size() == 2);
  CHECK(summary["lambdas"][0].get<double>() == doctest::Approx(0.05));
  CHECK(summary["lambdas"][1].get<double>() == doctest::Approx(0.5));

  REQUIRE(summary["spectra"].size() == 2);
  for (const auto& row : summary["spectra"]) {
    CHECK(row["mean_sigma"].get<double>() > 0.0);
    const double zeta_sq = row["mean_zeta_sq"].get<double>();
    CHECK(zeta_sq > 0.0);
    CHECK(zeta_sq <= 1.0);
    CHECK(row["selected_states"].get<int>() > 0);
  }
  // Stronger mixing broadens the strength function and erodes zeta^2.
  CHECK(summary["spectra"][1]["strength_variance"].get<double>() >
        summary["spectra"][0]["strength_variance"].get<double>());
  CHECK(summary["spectra"][0]["mean_zeta_sq"].get<double>() >
        summary["spectra"][1]["mean_zeta_sq"].get<double>());

  // Every CSV opens with the provenance comment and its pinned header.
  const auto lines = read_lines(out_dir + "/strength_00.csv");
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "# config_hash=" + hash + " master_seed=42");
  CHECK(lines[1] == "e_hat,density,stderr");
}

TEST_CASE("cli: reruns are byte-identical regardless of worker count") {
  const std::string out_dir = kDir + "/repro";
  const std::string cfg = write_config("repro.ini", base_config(out_dir));

  REQUIRE(run_cli("observe --config " + cfg, "EGOE_WORKERS=1").code == 0);
  const std::string strength_1 = read_file(out_dir + "/strength_00.csv");
  const std::string curve_1 = read_file(out_dir + "/xi2_curve_01.csv");
  const std::string summary_1 = read_file(out_dir + "/observe_summary.json");
  REQUIRE(!strength_1.empty());

  REQUIRE(run_cli("observe --config " + cfg, "EGOE_WORKERS=3").code == 0);
  CHECK(read_file(out_dir + "/strength_00.csv") == strength_1);
  CHECK(read_file(out_dir + "/xi2_curve_01.csv") == curve_1);
  CHECK(read_file(out_dir + "/observe_summary.json") == summary_1);
}

TEST_CASE("cli: seed, member, and out overrides reach the outputs") {
  const std::string dir_a = kDir + "/override_a";
  const std::string dir_b = kDir + "/override_b";
  const std::string cfg = write_config("override.ini", base_config(dir_a));

  REQUIRE(run_cli("observe --config " + cfg).code == 0);
  REQUIRE(run_cli("observe --config " + cfg + " --seed 43 --members 5 --out " + dir_b).code == 0);

  const json a = load_json(dir_a + "/observe_summary.json");
  const json b = load_json(dir_b + "/observe_summary.json");
  CHECK(b["master_seed"].get<std::uint64_t>() == 43);
  CHECK(b["config"]["ensemble.members"].get<std::string>() == "5");
  CHECK(b["config"]["ensemble.master_seed"].get<std::string>() == "43");
  CHECK(b["config"]["run.out"].get<std::string>() == dir_b);
  CHECK(b["config_hash"].get<std::string>() != a["config_hash"].get<std::string>());
  // A different seed draws a different ensemble.
  CHECK(a["spectra"][0]["mean_sigma"].get<double>() !=
        b["spectra"][0]["mean_sigma"].get<double>());
}

TEST_CASE("cli: generate persists Hamiltonians the library reproduces bit-exactly") {
  const std::string out_dir = kDir + "/generate";
  const std::string cfg = write_config("generate.ini", base_config(out_dir));
  const auto result = run_cli("generate --config " + cfg + " --members 2");
  CAPTURE(result.err);
  REQUIRE(result.code == 0);
  CHECK(result.out.find("generate: wrote 2 member(s) x 2 lambda(s)") != std::string::npos);

  for (const char* name : {"h_member000_lambda00.egoeh", "h_member000_lambda01.egoeh",
                           "h_member001_lambda00.egoeh", "h_member001_lambda01.egoeh"}) {
    CAPTURE(name);
    CHECK(fs::exists(fs::path(out_dir) / name));
  }

  // Rebuild member 1 at lambda index 1 (lambda = 0.5) in-process and compare.
  const std::string path = out_dir + "/h_member001_lambda01.egoeh";
  const Eigen::MatrixXd loaded = egoe::load_external_hamiltonian(path);
  const egoe::SpaceSpec space{7, 3};
  const egoe::FockBasis basis(space);
  const Eigen::VectorXd h1 = egoe::build_h1(egoe::default_mean_field(7), basis);
  const auto two_body = egoe::sample_two_body(space, egoe::SeedPolicy{42, 1}, 1.0);
  const Eigen::MatrixXd v_emb = egoe::embed_two_body(two_body, basis);
  const egoe::Hamiltonian h = egoe::assemble(h1, v_emb, 0.5);
  REQUIRE(loaded.rows() == h.matrix.rows());
  CHECK((loaded - h.matrix).cwiseAbs().maxCoeff() == 0.0);

  const std::string text = read_file(path);
  CHECK(text.find("# seed 42 member 1") != std::string::npos);
  CHECK(text.find("# lambda 0.5") != std::string::npos);
}

TEST_CASE("cli: diagonalize writes one spectral row per member and lambda") {
  const std::string out_dir = kDir + "/diagonalize";
  const std::string cfg = write_config("diagonalize.ini", base_config(out_dir));
  REQUIRE(run_cli("diagonalize --config " + cfg).code == 0);

  const auto lines = read_lines(out_dir + "/spectra.csv");
  REQUIRE(lines.size() == 2 + 2 * 3);  // comment + header + lambdas x members
  CHECK(lines[1] == "lambda,member,centroid,sigma,zeta_sq,ks_wigner,ks_poisson");

  double zeta_sum[2] = {0.0, 0.0};
  for (std::size_t i = 2; i < lines.size(); ++i) {
    double lambda = 0.0, centroid = 0.0, sigma = 0.0, zeta_sq = 0.0, ks_w = 0.0, ks_p = 0.0;
    int member = -1;
    REQUIRE(std::sscanf(lines[i].c_str(), "%lf,%d,%lf,%lf,%lf,%lf,%lf", &lambda, &member,
                        &centroid, &sigma, &zeta_sq, &ks_w, &ks_p) == 7);
    CHECK(member == static_cast<int>((i - 2) % 3));
    CHECK(sigma > 0.0);
    CHECK(zeta_sq > 0.0);
    CHECK(zeta_sq <= 1.0);
    CHECK(ks_w >= 0.0);
    CHECK(ks_w < 1.0);
    CHECK(ks_p >= 0.0);
    CHECK(ks_p < 1.0);
    zeta_sum[i < 5 ? 0 : 1] += zeta_sq;
  }
  // zeta^2 decays as the two-body mixing takes over.
  CHECK(zeta_sum[0] > zeta_sum[1]);
}

TEST_CASE("cli: fit emits the width-scan table and per-lambda fit summaries") {
  const std::string out_dir = kDir + "/fit";
  std::string text = base_config(out_dir);
  // Smoother spectra and denser sampling keep every histogram bin populated.
  text.replace(text.find("lambda = 0.05,0.5"), 17, "lambda = 0.3,0.5");
  text.replace(text.find("members = 3"), 11, "members = 10");
  text.replace(text.find("bins = 21"), 9, "bins = 25");
  text.replace(text.find("e_lo = -3.0"), 11, "e_lo = -2.0");
  text.replace(text.find("e_hi = 3.0"), 10, "e_hi = 2.0");
  const std::string cfg = write_config("fit.ini", text);
  const auto result = run_cli("fit --config " + cfg);
  CAPTURE(result.err);
  REQUIRE(result.code == 0);

  const auto lines = read_lines(out_dir + "/widthscan.csv");
  REQUIRE(lines.size() == 2 + 2);
  CHECK(lines[1] == "lambda,shape_free,gamma_std,gamma_raw,residual,in_bw_domain");

  const json summary = load_json(out_dir + "/fit_summary.json");
  REQUIRE(summary["fits"].size() == 2);
  for (std::size_t l = 0; l < 2; ++l) {
    const auto& fit = summary["fits"][l];
    CHECK(fit["scale"].get<double>() > 0.0);
    CHECK(fit["shape"].get<double>() > 0.0);
    CHECK(fit["r_squared"].get<double>() > 0.5);

    double lambda = 0.0, shape_free = 0.0, gamma_std = 0.0, gamma_raw = 0.0, residual = 0.0;
    int in_bw = -1;
    REQUIRE(std::sscanf(lines[2 + l].c_str(), "%lf,%lf,%lf,%lf,%lf,%d", &lambda, &shape_free,
                        &gamma_std, &gamma_raw, &residual, &in_bw) == 6);
    CHECK(lambda == doctest::Approx(fit["lambda"].get<double>()));
    CHECK(gamma_std > 0.0);
    CHECK((in_bw == 0 || in_bw == 1));
    // gamma_raw is the standardized width restored to raw energy units.
    const double mean_sigma = fit["mean_sigma"].get<double>();
    CHECK(gamma_raw == doctest::Approx(gamma_std * mean_sigma).epsilon(1e-9));
  }
}

TEST_CASE("cli: duality scans three spaces and reports crossings") {
  const std::string out_dir = kDir + "/duality";
  std::string text = base_config(out_dir,
                                 "[duality]\n"
                                 "m_values = 2,3,4\n"
                                 "half_filling = true\n"
                                 "observable = xi2\n"
                                 "central_halfwidth = 0.5\n");
  text.replace(text.find("lambda = 0.05,0.5"), 17, "lambda = 0.05,0.2,0.8,2.0");
  const std::string cfg = write_config("duality.ini", text);
  const auto result = run_cli("duality --config " + cfg);
  CAPTURE(result.err);
  REQUIRE(result.code == 0);
  CHECK(result.out.find("duality: wrote scans for 3 m value(s)") != std::string::npos);

  for (const char* name : {"duality_m2.csv", "duality_m3.csv", "duality_m4.csv", "scaling.csv",
                           "duality_summary.json"}) {
    CAPTURE(name);
    CHECK(fs::exists(fs::path(out_dir) / name));
  }
  const auto lines = read_lines(out_dir + "/duality_m3.csv");
  REQUIRE(lines.size() == 2 + 4);  // comment + header + one row per lambda

  const json summary = load_json(out_dir + "/duality_summary.json");
  REQUIRE(summary["per_m"].size() == 3);
  const int expected_dims[3] = {6, 20, 70};  // C(2m, m)
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& entry = summary["per_m"][i];
    const int m = entry["m"].get<int>();
    CHECK(m == static_cast<int>(i) + 2);
    CHECK(entry["n"].get<int>() == 2 * m);
    CHECK(entry["dim"].get<int>() == expected_dims[i]);
    for (const char* obs : {"xi2", "info_entropy", "strength_variance"}) {
      const std::string status = entry["crossings"][obs]["status"].get<std::string>();
      CHECK((status == "ok" || status == "no-crossing" || status == "multiple-crossings"));
    }
  }
  CHECK(summary.contains("scaling"));
}

TEST_CASE("cli: ingest reproduces library numbers for an external Hamiltonian") {
  // Persist one EGOE member as an "external" matrix, then push it through the
  // CLI and through the library directly; the numbers must agree.
  const egoe::SpaceSpec space{7, 3};
  const egoe::FockBasis basis(space);
  const Eigen::VectorXd h1 = egoe::build_h1(egoe::default_mean_field(7), basis);
  const auto two_body = egoe::sample_two_body(space, egoe::SeedPolicy{7, 0}, 1.0);
  const egoe::Hamiltonian h = egoe::assemble(h1, egoe::embed_two_body(two_body, basis), 0.3);
  const std::string h_path = kDir + "/external_h.egoeh";
  egoe::save_hamiltonian(h_path, h.matrix, {"external test member"});

  const std::string out_dir = kDir + "/ingest_h";
  const std::string cfg = write_config(
      "ingest_h.ini",
      base_config(out_dir, "hamiltonian_file = " + h_path));
  const auto result = run_cli("ingest --config " + cfg + " --mode ingest");
  CAPTURE(result.err);
  REQUIRE(result.code == 0);

  CHECK(fs::exists(fs::path(out_dir) / "ingest_strength.csv"));
  CHECK(fs::exists(fs::path(out_dir) / "ingest_curves.csv"));
  const std::string curves_text = read_file(out_dir + "/ingest_curves.csv");
  CHECK(curves_text.find("external-xi2") != std::string::npos);
  CHECK(curves_text.find("external-sinfo") != std::string::npos);

  auto decomp = egoe::diagonalize(h.matrix);
  const auto std_spec = egoe::standardize(decomp);
  egoe::HistogramOptions options;
  options.bins = 21;
  options.lo = -3.0;
  options.hi = 3.0;
  options.k_halfwidth = 0.6;
  const std::vector<egoe::SpectralDecomposition> decomps{decomp};
  const std::vector<egoe::StandardizedSpectrum> stds{std_spec};
  const auto hist = egoe::strength_function(decomps, stds, options);

  const json summary = load_json(out_dir + "/ingest_summary.json");
  const auto& ham = summary["hamiltonian"];
  CHECK(ham["dim"].get<int>() == 35);
  CHECK(ham["sigma"].get<double>() == doctest::Approx(std_spec.stats.sigma).epsilon(1e-12));
  CHECK(ham["zeta_sq"].get<double>() == doctest::Approx(std_spec.stats.zeta_sq).epsilon(1e-12));
  CHECK(ham["strength_variance"].get<double>() == doctest::Approx(hist.variance).epsilon(1e-12));
  CHECK(summary["config"]["run.mode"].get<std::string>() == "ingest");
  CHECK(!summary.contains("strength_fit"));
}

TEST_CASE("cli: ingest fits an external strength function") {
  // A sampled Gaussian profile, deliberately scaled by 7 to exercise the
  // normalization bookkeeping; the fit must land in the Gaussian domain.
  const int n = 41;
  Eigen::VectorXd centers(n), density(n);
  const double sigma = 0.8;
  for (int i = 0; i < n; ++i) {
    const double x = -3.0 + 6.0 * i / (n - 1);
    centers[i] = x;
    density[i] = 7.0 * std::exp(-0.5 * x * x / (sigma * sigma)) /
                 (sigma * std::sqrt(2.0 * M_PI));
  }
  const std::string f_path = kDir + "/external_f.egoef";
  egoe::save_strength(f_path, centers, density, {"gaussian profile"});

  const std::string out_dir = kDir + "/ingest_f";
  const std::string cfg = write_config(
      "ingest_f.ini", base_config(out_dir, "strength_file = " + f_path));
  const auto result = run_cli("ingest --config " + cfg);
  CAPTURE(result.err);
  REQUIRE(result.code == 0);

  CHECK(fs::exists(fs::path(out_dir) / "ingest_strength_fit.csv"));
  const json summary = load_json(out_dir + "/ingest_summary.json");
  CHECK(!summary.contains("hamiltonian"));
  const auto& fit = summary["strength_fit"];
  CHECK(fit["norm_factor"].get<double>() == doctest::Approx(7.0).epsilon(0.01));
  CHECK(fit["shape"].get<double>() > 50.0);
  CHECK(fit["scale"].get<double>() == doctest::Approx(sigma).epsilon(0.05));
  CHECK(fit["converged"].get<bool>());
}

TEST_CASE("cli: exit codes distinguish config, numeric, and io failures") {
  const std::string out_dir = kDir + "/errors";

  SUBCASE("missing config file is an io error") {
    const auto result = run_cli("observe --config " + kDir + "/does_not_exist.ini");
    CHECK(result.code == 4);
    CHECK(result.err.find("error (io):") != std::string::npos);
  }

  SUBCASE("invalid config value is a config error") {
    std::string text = base_config(out_dir);
    text.replace(text.find("v = 1.0"), 7, "v = -1.0");
    const std::string cfg = write_config("bad_value.ini", text);
    const auto result = run_cli("observe --config " + cfg);
    CHECK(result.code == 2);
    CHECK(result.err.find("error (config): config: ensemble.v must be positive") !=
          std::string::npos);
  }

  SUBCASE("unknown mode override is a config error") {
    const std::string cfg = write_config("mode.ini", base_config(out_dir));
    const auto result = run_cli("observe --config " + cfg + " --mode turbo");
    CHECK(result.code == 2);
    CHECK(result.err.find("--mode must be 'simulate' or 'ingest'") != std::string::npos);
  }

  SUBCASE("empty selection window is a numeric error") {
    std::string text = base_config(out_dir);
    text.replace(text.find("k_halfwidth = 0.6"), 17, "k_halfwidth = 1e-9");
    const std::string cfg = write_config("numeric.ini", text);
    const auto result = run_cli("observe --config " + cfg);
    CHECK(result.code == 3);
    CHECK(result.err.find("error (numeric):") != std::string::npos);
  }

  SUBCASE("a subcommand is required") {
    const std::string cfg = write_config("nosub.ini", base_config(out_dir));
    CHECK(run_cli("--config " + cfg).code != 0);
  }
}

TEST_CASE("cli: report merges whichever summaries exist") {
  // One output directory accumulating observe + ingest results; report must
  // pick up exactly those two sections.
  const int n = 41;
  Eigen::VectorXd centers(n), density(n);
  for (int i = 0; i < n; ++i) {
    const double x = -3.0 + 6.0 * i / (n - 1);
    centers[i] = x;
    density[i] = std::exp(-0.5 * x * x / 0.64);
  }
  const std::string f_path = kDir + "/report_f.egoef";
  egoe::save_strength(f_path, centers, density);

  const std::string out_dir = kDir + "/report";
  const std::string cfg = write_config(
      "report.ini", base_config(out_dir, "strength_file = " + f_path));
  REQUIRE(run_cli("observe --config " + cfg).code == 0);
  REQUIRE(run_cli("ingest --config " + cfg).code == 0);
  const auto result = run_cli("report --config " + cfg);
  CAPTURE(result.err);
  REQUIRE(result.code == 0);

  const json report = load_json(out_dir + "/report.json");
  REQUIRE(report.contains("sections"));
  CHECK(report["sections"].size() == 2);
  CHECK(report["sections"].contains("observe_summary.json"));
  CHECK(report["sections"].contains("ingest_summary.json"));
  CHECK(!report["sections"].contains("fit_summary.json"));
  CHECK(report["sections"]["observe_summary.json"]["config_hash"].get<std::string>() ==
        report["config_hash"].get<std::string>());
}
