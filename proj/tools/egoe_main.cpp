// egoe: config-driven EGOE(1+2) simulation, fitting, and duality scans.
//
// Subcommands: generate | diagonalize | observe | fit | duality | ingest | report
// Common flags: --config <file> [--seed S] [--members M] [--out DIR] [--mode MODE]
// Worker threads come from the EGOE_WORKERS environment variable.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "egoe/ansatz.hpp"
#include "egoe/config.hpp"
#include "egoe/duality.hpp"
#include "egoe/errors.hpp"
#include "egoe/io.hpp"
#include "egoe/parallel.hpp"
#include "egoe/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

std::string lambda_tag(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02zu", index);
  return buf;
}

egoe::EnsembleSetup make_setup(const egoe::RunConfig& config) {
  egoe::EnsembleSetup setup;
  setup.space = config.space;
  setup.mean_field = config.mean_field();
  setup.v_scale = config.v_scale;
  setup.members = config.members;
  setup.master_seed = config.master_seed;
  setup.workers = egoe::worker_count();
  return setup;
}

egoe::HistogramOptions histogram_options(const egoe::RunConfig& config) {
  egoe::HistogramOptions options;
  options.bins = config.bins;
  options.lo = config.e_lo;
  options.hi = config.e_hi;
  options.k_halfwidth = config.k_halfwidth;
  return options;
}

egoe::CurveOptions curve_options(const egoe::RunConfig& config) {
  egoe::CurveOptions options;
  options.lo = config.e_lo;
  options.hi = config.e_hi;
  options.points = config.curve_points;
  options.window = config.curve_window;
  return options;
}

json meta_json(const egoe::RunConfig& config, const egoe::OutputMeta& meta) {
  json j;
  j["config_hash"] = meta.config_hash;
  j["master_seed"] = meta.master_seed;
  j["config"] = json::object();
  for (const auto& [key, value] : config.key_values()) j["config"][key] = value;
  return j;
}

void write_json(const fs::path& path, const json& j) {
  egoe::write_text_file(path.string(), j.dump(2) + "\n");
}

json fit_to_json(const egoe::AnsatzParams& fit) {
  return json{{"center", fit.center},
              {"scale", fit.scale},
              {"shape", fit.shape},
              {"residual_norm", fit.fit.residual_norm},
              {"r_squared", fit.fit.r_squared},
              {"converged", fit.fit.converged}};
}

int run_generate(const egoe::RunConfig& config, const egoe::OutputMeta& meta) {
  const egoe::FockBasis basis(config.space);
  const Eigen::VectorXd h1 = egoe::build_h1(config.mean_field(), basis);
  for (int member = 0; member < config.members; ++member) {
    const egoe::SeedPolicy seeds{config.master_seed, static_cast<std::uint64_t>(member)};
    const auto two_body = egoe::sample_two_body(config.space, seeds, config.v_scale);
    const Eigen::MatrixXd v_emb = egoe::embed_two_body(two_body, basis);
    egoe::Provenance prov;
    prov.master_seed = config.master_seed;
    prov.member_index = static_cast<std::uint64_t>(member);
    for (std::size_t l = 0; l < config.lambdas.size(); ++l) {
      const egoe::Hamiltonian h = egoe::assemble(h1, v_emb, config.lambdas[l]);
      char name[64];
      std::snprintf(name, sizeof(name), "h_member%03d_lambda%s.egoeh", member,
                    lambda_tag(l).c_str());
      egoe::save_hamiltonian(
          (fs::path(config.out_dir) / name).string(), h.matrix,
          {prov.to_string(), "lambda " + egoe::format_g12(config.lambdas[l]),
           "config_hash " + meta.config_hash});
    }
  }
  std::printf("generate: wrote %d member(s) x %zu lambda(s) to %s\n", config.members,
              config.lambdas.size(), config.out_dir.c_str());
  return 0;
}

int run_diagonalize(const egoe::RunConfig& config, const egoe::OutputMeta& meta) {
  const fs::path csv = fs::path(config.out_dir) / "spectra.csv";
  std::ofstream out(csv);
  if (!out) throw egoe::IoError("cannot open for writing: " + csv.string());
  out << meta.comment_line() << '\n';
  out << "lambda,member,centroid,sigma,zeta_sq,ks_wigner,ks_poisson\n";
  for (double lambda : config.lambdas) {
    const auto ensemble = egoe::collect_members(make_setup(config), lambda);
    for (std::size_t m = 0; m < ensemble.decomps.size(); ++m) {
      const Eigen::VectorXd spacings = egoe::unfold(ensemble.decomps[m].eigenvalues);
      const std::vector<double> sp(spacings.data(), spacings.data() + spacings.size());
      const double ks_w = egoe::ks_distance(sp, egoe::wigner_surmise_cdf);
      const double ks_p = egoe::ks_distance(sp, egoe::poisson_spacing_cdf);
      const auto& stats = ensemble.stds[m].stats;
      out << egoe::format_g12(lambda) << ',' << m << ',' << egoe::format_g12(stats.centroid)
          << ',' << egoe::format_g12(stats.sigma) << ',' << egoe::format_g12(stats.zeta_sq)
          << ',' << egoe::format_g12(ks_w) << ',' << egoe::format_g12(ks_p) << '\n';
    }
  }
  if (!out) throw egoe::IoError("write failed: " + csv.string());
  std::printf("diagonalize: wrote %s\n", csv.string().c_str());
  return 0;
}

int run_observe(const egoe::RunConfig& config, const egoe::OutputMeta& meta) {
  json summary = meta_json(config, meta);
  summary["lambdas"] = config.lambdas;
  for (std::size_t l = 0; l < config.lambdas.size(); ++l) {
    const auto ensemble = egoe::collect_members(make_setup(config), config.lambdas[l]);
    const auto hist = ensemble.histogram(histogram_options(config));
    const auto tag = lambda_tag(l);
    const fs::path base(config.out_dir);
    egoe::write_histogram_csv((base / ("strength_" + tag + ".csv")).string(), hist, meta);
    const std::vector<egoe::ObservableCurve> xi2{ensemble.xi2_curve(curve_options(config))};
    const std::vector<egoe::ObservableCurve> sinfo{ensemble.sinfo_curve(curve_options(config))};
    egoe::write_curves_csv((base / ("xi2_curve_" + tag + ".csv")).string(), xi2, meta);
    egoe::write_curves_csv((base / ("sinfo_curve_" + tag + ".csv")).string(), sinfo, meta);
    summary["spectra"].push_back({{"lambda", config.lambdas[l]},
                                  {"mean_sigma", ensemble.mean_sigma},
                                  {"mean_zeta_sq", ensemble.mean_zeta_sq},
                                  {"strength_variance", hist.variance},
                                  {"excess_kurtosis", hist.excess_kurtosis},
                                  {"selected_states", hist.selected_states}});
  }
  write_json(fs::path(config.out_dir) / "observe_summary.json", summary);
  std::printf("observe: wrote curves for %zu lambda(s) to %s\n", config.lambdas.size(),
              config.out_dir.c_str());
  return 0;
}

int run_fit(const egoe::RunConfig& config, const egoe::OutputMeta& meta) {
  std::vector<egoe::StrengthHistogram> hists;
  std::vector<double> sigmas;
  json summary = meta_json(config, meta);
  for (double lambda : config.lambdas) {
    const auto ensemble = egoe::collect_members(make_setup(config), lambda);
    hists.push_back(ensemble.histogram(histogram_options(config)));
    sigmas.push_back(ensemble.mean_sigma);
  }
  const auto table = egoe::bw_width_scan(config.lambdas, hists, sigmas);

  const fs::path csv = fs::path(config.out_dir) / "widthscan.csv";
  std::ofstream out(csv);
  if (!out) throw egoe::IoError("cannot open for writing: " + csv.string());
  out << meta.comment_line() << '\n';
  out << "lambda,shape_free,gamma_std,gamma_raw,residual,in_bw_domain\n";
  for (const auto& p : table) {
    out << egoe::format_g12(p.lambda) << ',' << egoe::format_g12(p.shape_free) << ','
        << egoe::format_g12(p.gamma_std) << ',' << egoe::format_g12(p.gamma_raw) << ','
        << egoe::format_g12(p.residual) << ',' << (p.in_bw_domain ? 1 : 0) << '\n';
  }
  if (!out) throw egoe::IoError("write failed: " + csv.string());

  for (std::size_t l = 0; l < config.lambdas.size(); ++l) {
    const auto fit = egoe::fit_ansatz(hists[l]);
    json row = fit_to_json(fit);
    row["lambda"] = config.lambdas[l];
    row["mean_sigma"] = sigmas[l];
    summary["fits"].push_back(row);
  }
  write_json(fs::path(config.out_dir) / "fit_summary.json", summary);
  std::printf("fit: wrote %s and fit_summary.json\n", csv.string().c_str());
  return 0;
}

int run_duality(const egoe::RunConfig& config, const egoe::OutputMeta& meta) {
  json summary = meta_json(config, meta);
  std::vector<egoe::ScalingPoint> points;
  egoe::DualityOptions options;
  options.central_halfwidth = config.central_halfwidth;
  options.workers = egoe::worker_count();

  for (int m : config.duality_m_values) {
    egoe::SpaceSpec space{config.half_filling ? 2 * m : config.fixed_n, m};
    const auto mf = config.mean_field_kind == "default"
                        ? egoe::default_mean_field(space.n_sp)
                        : config.mean_field();
    const auto scan = egoe::run_scan(space, mf, config.v_scale, config.lambdas,
                                     config.members, config.master_seed, options);
    egoe::write_duality_csv(
        (fs::path(config.out_dir) / ("duality_m" + std::to_string(m) + ".csv")).string(), scan,
        meta);

    json crossings;
    for (auto obs : {egoe::DualObservable::xi2, egoe::DualObservable::info_entropy,
                     egoe::DualObservable::strength_variance}) {
      const auto crossing = egoe::find_crossing(scan, obs);
      crossings[egoe::to_string(obs)] = {{"lambda_d", crossing.lambda_d},
                                         {"err", crossing.err},
                                         {"stat_err", crossing.stat_err},
                                         {"interp_err", crossing.interp_err},
                                         {"status", crossing.status}};
      if (obs == config.crossing_observable && crossing.status == "ok") {
        points.push_back({m, crossing.lambda_d, crossing.err});
      }
    }
    summary["per_m"].push_back(
        {{"m", m}, {"n", space.n_sp}, {"dim", space.dim()}, {"crossings", crossings}});
  }

  egoe::write_scaling_csv((fs::path(config.out_dir) / "scaling.csv").string(), points, meta);
  if (points.size() >= 3) {
    const auto fit = egoe::scaling_fit(points);
    summary["scaling"] = {{"exponent", fit.exponent},       {"exponent_err", fit.exponent_err},
                          {"amplitude", fit.amplitude},     {"amplitude_err", fit.amplitude_err},
                          {"chi2", fit.chi2},               {"dof", fit.dof},
                          {"observable", egoe::to_string(config.crossing_observable)}};
  } else {
    summary["scaling"] = {{"error", "fewer than 3 usable crossings; no power-law fit"}};
  }
  write_json(fs::path(config.out_dir) / "duality_summary.json", summary);
  std::printf("duality: wrote scans for %zu m value(s) to %s\n",
              config.duality_m_values.size(), config.out_dir.c_str());
  return 0;
}

int run_ingest(const egoe::RunConfig& config, const egoe::OutputMeta& meta) {
  if (config.hamiltonian_file.empty() && config.strength_file.empty()) {
    throw egoe::ConfigError(
        "ingest needs run.hamiltonian_file and/or run.strength_file in the config");
  }
  json summary = meta_json(config, meta);
  const fs::path base(config.out_dir);

  if (!config.hamiltonian_file.empty()) {
    const Eigen::MatrixXd h = egoe::load_external_hamiltonian(config.hamiltonian_file);
    auto decomp = egoe::diagonalize(h);
    decomp.basis_tag = "external";
    const auto std_spec = egoe::standardize(decomp);
    const std::vector<egoe::SpectralDecomposition> decomps{decomp};
    const std::vector<egoe::StandardizedSpectrum> stds{std_spec};
    const auto hist = egoe::strength_function(decomps, stds, histogram_options(config));
    egoe::write_histogram_csv((base / "ingest_strength.csv").string(), hist, meta);

    const Eigen::VectorXd xi2 = egoe::participation_ratio(decomp);
    const Eigen::VectorXd s = egoe::info_entropy(decomp);
    std::vector<double> e(std_spec.e_hat.data(), std_spec.e_hat.data() + std_spec.e_hat.size());
    const std::vector<egoe::ObservableCurve> curves{
        egoe::curve_over_energy({xi2.data(), static_cast<std::size_t>(xi2.size())}, e,
                                curve_options(config), "external-xi2"),
        egoe::curve_over_energy({s.data(), static_cast<std::size_t>(s.size())}, e,
                                curve_options(config), "external-sinfo")};
    egoe::write_curves_csv((base / "ingest_curves.csv").string(), curves, meta);
    summary["hamiltonian"] = {{"path", config.hamiltonian_file},
                              {"dim", decomp.dim()},
                              {"sigma", std_spec.stats.sigma},
                              {"zeta_sq", std_spec.stats.zeta_sq},
                              {"strength_variance", hist.variance}};
  }

  if (!config.strength_file.empty()) {
    const auto ext = egoe::load_external_strength(config.strength_file);
    const auto hist = ext.to_histogram();
    const auto fit = egoe::fit_ansatz(hist);
    json fj = fit_to_json(fit);
    fj["path"] = config.strength_file;
    fj["norm_factor"] = ext.norm_factor;
    summary["strength_fit"] = fj;
    egoe::write_histogram_csv((base / "ingest_strength_fit.csv").string(), hist, meta);
  }

  write_json(base / "ingest_summary.json", summary);
  std::printf("ingest: wrote summaries to %s\n", config.out_dir.c_str());
  return 0;
}

int run_report(const egoe::RunConfig& config, const egoe::OutputMeta& meta) {
  json report = meta_json(config, meta);
  const fs::path base(config.out_dir);
  for (const char* name :
       {"observe_summary.json", "fit_summary.json", "duality_summary.json",
        "ingest_summary.json"}) {
    const fs::path path = base / name;
    if (!fs::exists(path)) continue;
    std::ifstream in(path);
    if (!in) throw egoe::IoError("cannot open for reading: " + path.string());
    json part;
    in >> part;
    report["sections"][name] = part;
  }
  write_json(base / "report.json", report);
  std::printf("report: merged summaries into %s\n", (base / "report.json").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EGOE(1+2) strength functions, chaos measures, and basis duality"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "run configuration file")->required();
  std::uint64_t seed_override = 0;
  bool have_seed = false;
  auto* seed_opt = app.add_option("--seed", seed_override, "override ensemble.master_seed");
  int members_override = 0;
  auto* members_opt =
      app.add_option("--members", members_override, "override ensemble.members");
  std::string out_override;
  auto* out_opt = app.add_option("--out", out_override, "override run.out");
  std::string mode_override;
  auto* mode_opt = app.add_option("--mode", mode_override, "override run.mode (simulate|ingest)");

  auto* generate = app.add_subcommand("generate", "sample and persist member Hamiltonians");
  auto* diagonalize = app.add_subcommand("diagonalize", "spectral statistics per member");
  auto* observe = app.add_subcommand("observe", "strength functions and chaos-measure curves");
  auto* fit = app.add_subcommand("fit", "ansatz fits and the Breit-Wigner width scan");
  auto* duality = app.add_subcommand("duality", "weak/strong scans, crossings, scaling fit");
  auto* ingest = app.add_subcommand("ingest", "external EGOE-H/EGOE-F files through the pipeline");
  auto* report = app.add_subcommand("report", "merge JSON summaries in the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  have_seed = seed_opt->count() > 0;

  try {
    egoe::RunConfig config = egoe::load_config(config_path);
    if (have_seed) config.master_seed = seed_override;
    if (members_opt->count() > 0) config.members = members_override;
    if (out_opt->count() > 0) config.out_dir = out_override;
    if (mode_opt->count() > 0) {
      if (mode_override == "simulate") config.mode = egoe::RunMode::simulate;
      else if (mode_override == "ingest") config.mode = egoe::RunMode::ingest;
      else throw egoe::ConfigError("--mode must be 'simulate' or 'ingest'");
    }
    config.validate();
    fs::create_directories(config.out_dir);

    egoe::OutputMeta meta;
    meta.config_hash = egoe::config_hash(config);
    meta.master_seed = config.master_seed;

    if (generate->parsed()) return run_generate(config, meta);
    if (diagonalize->parsed()) return run_diagonalize(config, meta);
    if (observe->parsed()) return run_observe(config, meta);
    if (fit->parsed()) return run_fit(config, meta);
    if (duality->parsed()) return run_duality(config, meta);
    if (ingest->parsed()) return run_ingest(config, meta);
    if (report->parsed()) return run_report(config, meta);
    std::fprintf(stderr, "error (config): no subcommand selected\n");
    return kExitConfig;
  } catch (const egoe::ConfigError& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return kExitConfig;
  } catch (const egoe::NumericError& e) {
    std::fprintf(stderr, "error (numeric): %s\n", e.what());
    return kExitNumeric;
  } catch (const egoe::IoError& e) {
    std::fprintf(stderr, "error (io): %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
