// Command-line front end: simulate | estimate | test | power | invert-hd |
// link-table. Every run emits a manifest (sidecar file next to --out, or
// embedded in the JSON when printing to stdout); replaying a manifest's
// command reproduces the numeric outputs bit-exactly.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "aniso/contour.hpp"
#include "aniso/elliptic.hpp"
#include "aniso/errors.hpp"
#include "aniso/estimators.hpp"
#include "aniso/field_sim.hpp"
#include "aniso/grf_io.hpp"
#include "aniso/image_io.hpp"
#include "aniso/isotropy_test.hpp"
#include "aniso/json_io.hpp"
#include "aniso/lkc.hpp"
#include "aniso/palm_stats.hpp"

namespace {

using aniso::json;

aniso::FieldGrid load_grid(const std::string& path) {
  // Route on extension, falling back to magic-byte sniffing.
  const auto ends_with = [&](const char* suffix) {
    const std::string s(suffix);
    return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with(".grf1") || ends_with(".grf")) return aniso::read_grf1(path);
  if (ends_with(".csv")) return aniso::read_csv_grid(path);
  if (ends_with(".pgm")) return aniso::read_pgm(path);
  if (ends_with(".png")) return aniso::read_png_gray(path);
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw aniso::PreconditionError("cannot open input: " + path);
  char head[8] = {};
  probe.read(head, 8);
  if (std::memcmp(head, "GRF1", 4) == 0) return aniso::read_grf1(path);
  if (head[0] == 'P' && (head[1] == '5' || head[1] == '2')) return aniso::read_pgm(path);
  if (static_cast<unsigned char>(head[0]) == 0x89 && head[1] == 'P') return aniso::read_png_gray(path);
  return aniso::read_csv_grid(path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw aniso::PreconditionError("cannot open output: " + path);
  out << text;
}

void emit_json(const json& payload, const json& manifest, const std::string& out_path) {
  if (out_path.empty()) {
    json with_manifest = payload;
    with_manifest["manifest"] = manifest;
    std::cout << with_manifest.dump(2) << "\n";
  } else {
    write_text(out_path, payload.dump(2) + "\n");
    write_text(out_path + ".manifest.json", manifest.dump(2) + "\n");
  }
}

struct EstimateFlags {
  std::string input;
  std::string out;
  double level = 0.0;
  bool level_set = false;
  std::string method = "contour";
  std::size_t points = 1000000;
  double smoothing = 0.0;
  bool binary = false;
  double alpha1 = 0.5;
  double cond = 3.0;
};

json run_estimators(const aniso::FieldGrid& grid, const EstimateFlags& flags) {
  const double level = flags.binary ? 0.5 : flags.level;
  std::vector<aniso::ContourPath> paths;
  if (flags.binary) {
    paths = aniso::extract_binary_boundary(grid, flags.smoothing);
  } else {
    paths = aniso::extract_level_set(grid, level);
    if (paths.empty()) throw aniso::PreconditionError("empty level set at the requested level");
  }
  aniso::ContourSet set = aniso::resample_and_normals(paths, flags.points);
  set.level = level;
  const aniso::PalmSummary summary = aniso::summarize(set);

  json out;
  out["level"] = level;
  out["palm_summary"] = aniso::to_json(summary);
  json estimates = json::array();
  json errors = json::object();

  std::optional<aniso::AnisotropyEstimate> contour_est;
  std::optional<aniso::LkcEstimate> lkc_est;

  const bool want_all = flags.method == "all";
  const auto wants = [&](const char* m) { return want_all || flags.method == m; };

  if (wants("contour") || wants("combined")) {
    try {
      contour_est = aniso::estimate_contour_2d(summary);
      if (wants("contour")) estimates.push_back(aniso::to_json(*contour_est));
    } catch (const std::exception& e) {
      errors["contour"] = e.what();
    }
  }
  if (wants("lkc") || wants("combined")) {
    try {
      const aniso::LKCSummary lkc = aniso::lkc_summarize(grid, level, set);
      out["lkc_summary"] = aniso::to_json(lkc);
      lkc_est = aniso::estimate_kappa_lkc(lkc);
      if (wants("lkc")) {
        aniso::AnisotropyEstimate est;
        est.method = aniso::Method::LKC;
        est.kappa = lkc_est->kappa_hat;
        est.diagnostics["R_hat"] = lkc_est->R_hat;
        est.diagnostics["truncated"] = lkc_est->truncated ? 1.0 : 0.0;
        est.diagnostics["no_direction"] = 1.0;  // LKC carries no angle
        estimates.push_back(aniso::to_json(est));
      }
    } catch (const std::exception& e) {
      errors["lkc"] = e.what();
    }
  }
  if (wants("combined")) {
    if (contour_est && lkc_est) {
      aniso::AnisotropyEstimate est;
      est.method = aniso::Method::Combined;
      est.kappa = aniso::combine_estimates(lkc_est->R_hat, contour_est->F_stat, flags.alpha1);
      est.theta0 = contour_est->theta0;
      est.F_stat = contour_est->F_stat;
      est.diagnostics["alpha1"] = flags.alpha1;
      estimates.push_back(aniso::to_json(est));
    } else {
      errors["combined"] = "requires both contour and lkc inputs";
    }
  }
  if (wants("oracle")) {
    if (flags.binary) {
      errors["oracle"] = "oracle method needs field values, not a binary mask";
    } else {
      try {
        estimates.push_back(aniso::to_json(aniso::estimate_oracle_grad(grid)));
      } catch (const std::exception& e) {
        errors["oracle"] = e.what();
      }
    }
  }
  if (wants("palm-hd")) {
    try {
      const auto quad = aniso::make_sphere_quadrature(2);
      estimates.push_back(aniso::to_json(
          aniso::estimate_palm_hd(summary, aniso::default_box(flags.cond), quad)));
    } catch (const std::exception& e) {
      errors["palm-hd"] = e.what();
    }
  }

  out["estimates"] = estimates;
  if (!errors.empty()) out["errors"] = errors;
  if (!want_all && estimates.empty()) {
    // A single requested method that failed is a hard error.
    const std::string msg = errors.empty() ? "unknown method" : errors.begin()->dump();
    throw aniso::PreconditionError("estimate failed: " + msg);
  }
  return out;
}

std::string power_table_csv(const std::vector<aniso::PowerRow>& rows) {
  std::string csv = "method,kappa,u,N,level,rejection_rate,ks_distance,n_reps\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%s,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%d\n",
                  r.method.c_str(), r.kappa, r.level, r.N, r.alpha, r.rejection_rate,
                  r.ks_distance, r.n_reps);
    csv += line;
  }
  return csv;
}

std::string per_seed_csv(const std::vector<aniso::SeedRow>& rows) {
  std::string csv = "kappa,u,seed,F,kappa_c,theta_c,p_chi2,kappa_lkc\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%llu,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.kappa,
                  r.level, static_cast<unsigned long long>(r.seed), r.F, r.kappa_c, r.theta_c,
                  r.p_chi2, r.kappa_lkc);
    csv += line;
  }
  return csv;
}

std::string pvalue_cdf_csv(const std::vector<aniso::PValueSeries>& series) {
  std::string csv = "method,kappa,u,p,ecdf\n";
  char line[160];
  for (const auto& s : series) {
    std::vector<double> p = s.p_values;
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::snprintf(line, sizeof(line), "%s,%.17g,%.17g,%.17g,%.17g\n", s.method.c_str(), s.kappa,
                    s.level, p[i], static_cast<double>(i + 1) / static_cast<double>(p.size()));
      csv += line;
    }
  }
  return csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropy estimation and isotropy testing for excursion sets of 2D random fields"};
  app.require_subcommand(1);

  // --- simulate ------------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "synthesize a Gaussian random field");
  struct {
    std::size_t rows = 512, cols = 512;
    double domain = 100.0;
    double kappa = -1.0;
    double a = -1.0;
    double theta0 = 0.0;
    double mu = 0.0;
    double sigma = 1.0;
    std::uint64_t seed = 0;
    int pad = 2;
    std::string out;
    std::string format = "grf1";
  } sim;
  sim_cmd->add_option("--rows", sim.rows, "grid rows");
  sim_cmd->add_option("--cols", sim.cols, "grid cols");
  sim_cmd->add_option("--domain", sim.domain, "physical side length");
  sim_cmd->add_option("--kappa", sim.kappa, "target anisotropy in [0,1); converts to a");
  sim_cmd->add_option("--a", sim.a, "covariance scale a > 0 (alternative to --kappa)");
  sim_cmd->add_option("--theta0", sim.theta0, "principal direction, radians");
  sim_cmd->add_option("--mu", sim.mu, "field mean");
  sim_cmd->add_option("--sigma", sim.sigma, "field standard deviation");
  sim_cmd->add_option("--seed", sim.seed, "random seed");
  sim_cmd->add_option("--pad", sim.pad, "synthesis padding factor >= 1");
  sim_cmd->add_option("--out", sim.out, "output path")->required();
  sim_cmd->add_option("--format", sim.format, "grf1 | csv")
      ->check(CLI::IsMember({"grf1", "csv"}));
  sim_cmd->callback([&] {
    aniso::SimConfig cfg;
    cfg.grid_rows = sim.rows;
    cfg.grid_cols = sim.cols;
    cfg.domain_size = sim.domain;
    if (sim.kappa >= 0.0 && sim.a > 0.0)
      throw aniso::PreconditionError("give either --kappa or --a, not both");
    cfg.a = sim.a > 0.0 ? sim.a : aniso::a_for_kappa(sim.kappa < 0.0 ? 0.0 : sim.kappa);
    cfg.theta0 = sim.theta0;
    cfg.mean = sim.mu;
    cfg.std = sim.sigma;
    cfg.seed = sim.seed;
    cfg.pad_factor = sim.pad;
    const aniso::FieldGrid grid = aniso::simulate(cfg);
    if (sim.format == "grf1")
      aniso::write_grf1(grid, sim.out);
    else
      aniso::write_csv_grid(grid, sim.out);
    const json config{{"rows", sim.rows},     {"cols", sim.cols},   {"domain", sim.domain},
                      {"a", cfg.a},           {"theta0", sim.theta0}, {"mu", sim.mu},
                      {"sigma", sim.sigma},   {"pad", sim.pad},     {"format", sim.format},
                      {"out", sim.out}};
    write_text(sim.out + ".manifest.json",
               aniso::make_manifest("simulate", config, sim.seed).dump(2) + "\n");
  });

  // --- estimate --------------------------------------------------------------
  auto* est_cmd = app.add_subcommand("estimate", "estimate anisotropy from a field or image");
  EstimateFlags est;
  est_cmd->add_option("--in", est.input, "input field (grf1/csv/pgm/png)")->required();
  auto* level_opt = est_cmd->add_option("--level", est.level, "excursion level u");
  est_cmd->add_option("--method", est.method, "contour|lkc|combined|oracle|palm-hd|all")
      ->check(CLI::IsMember({"contour", "lkc", "combined", "oracle", "palm-hd", "all"}));
  est_cmd->add_option("--points", est.points, "contour resampling target");
  est_cmd->add_option("--smoothing", est.smoothing, "Gaussian pre-smoothing radius, px (binary input)");
  est_cmd->add_flag("--binary", est.binary, "treat input as a 0/1 excursion mask");
  est_cmd->add_option("--alpha1", est.alpha1, "combined-estimator LKC weight in [0,1]");
  est_cmd->add_option("--cond", est.cond, "conditioning guess r for palm-hd box");
  est_cmd->add_option("--out", est.out, "output JSON path (default stdout)");
  est_cmd->callback([&] {
    if (!est.binary && level_opt->count() == 0)
      throw aniso::PreconditionError("--level is required for field input");
    const aniso::FieldGrid grid = load_grid(est.input);
    json out = run_estimators(grid, est);
    out["input"] = est.input;
    const json config{{"in", est.input},       {"level", est.level},     {"method", est.method},
                      {"points", est.points},  {"smoothing", est.smoothing},
                      {"binary", est.binary},  {"alpha1", est.alpha1},   {"cond", est.cond}};
    emit_json(out, aniso::make_manifest("estimate", config, 0), est.out);
  });

  // --- test ------------------------------------------------------------------
  auto* test_cmd = app.add_subcommand("test", "chi^2(2)-Contour quasi-isotropy test");
  struct {
    std::string input;
    std::string out;
    double level = 0.0;
    int blocks = 10;
    double alpha = 0.05;
    std::size_t points = 1000000;
    bool binary = false;
    double smoothing = 0.0;
  } tst;
  test_cmd->add_option("--in", tst.input, "input field (grf1/csv/pgm/png)")->required();
  auto* tst_level = test_cmd->add_option("--level", tst.level, "excursion level u");
  test_cmd->add_option("--blocks", tst.blocks, "partition side N (N^2 cells)");
  test_cmd->add_option("--alpha", tst.alpha, "nominal test level");
  test_cmd->add_option("--points", tst.points, "contour resampling target");
  test_cmd->add_flag("--binary", tst.binary, "treat input as a 0/1 excursion mask");
  test_cmd->add_option("--smoothing", tst.smoothing, "mask pre-smoothing radius, px");
  test_cmd->callback([&] {
    if (tst.blocks * tst.blocks < 4)
      throw aniso::PreconditionError("--blocks must satisfy N^2 >= 4");
    if (!tst.binary && tst_level->count() == 0)
      throw aniso::PreconditionError("--level is required for field input");
    const aniso::FieldGrid grid = load_grid(tst.input);
    const double level = tst.binary ? 0.5 : tst.level;
    std::vector<aniso::ContourPath> paths =
        tst.binary ? aniso::extract_binary_boundary(grid, tst.smoothing)
                   : aniso::extract_level_set(grid, level);
    if (paths.empty()) throw aniso::PreconditionError("empty level set at the requested level");
    aniso::ContourSet set = aniso::resample_and_normals(paths, tst.points);
    set.level = level;
    const aniso::PalmSummary summary = aniso::summarize(set);
    const aniso::Rect window{grid.origin[0], grid.origin[1], grid.origin[0] + grid.width(),
                             grid.origin[1] + grid.height()};
    const aniso::CellStats cells = aniso::cell_stats(set, window, tst.blocks);
    const aniso::IsotropyTestResult result = aniso::chi2_contour_test(summary, cells);
    json out = aniso::to_json(result);
    out["reject"] = result.p_value < tst.alpha;
    out["alpha"] = tst.alpha;
    out["input"] = tst.input;
    const json config{{"in", tst.input},   {"level", tst.level}, {"blocks", tst.blocks},
                      {"alpha", tst.alpha}, {"points", tst.points}, {"binary", tst.binary}};
    emit_json(out, aniso::make_manifest("test", config, 0), tst.out);
  });

  // --- power -----------------------------------------------------------------
  auto* pow_cmd = app.add_subcommand("power", "Monte Carlo calibration / power study");
  aniso::PowerConfig pow;
  std::string pow_out, pow_pvals, pow_seeds;
  pow_cmd->add_option("--kappas", pow.kappas, "anisotropy values")->delimiter(',');
  pow_cmd->add_option("--levels", pow.levels, "excursion levels")->delimiter(',');
  pow_cmd->add_option("--blocks", pow.blocks, "partition side N");
  pow_cmd->add_option("--reps", pow.n_reps, "replicates per configuration (>= 50)");
  pow_cmd->add_option("--rows", pow.grid_rows, "grid rows");
  pow_cmd->add_option("--cols", pow.grid_cols, "grid cols");
  pow_cmd->add_option("--domain", pow.domain, "physical side length");
  pow_cmd->add_option("--theta0", pow.theta0, "alternative's principal direction");
  pow_cmd->add_option("--points", pow.target_points, "contour resampling target");
  pow_cmd->add_option("--null-sims", pow.n_null_sims,
                      "null simulations for the model-based variants (0 = skip)");
  pow_cmd->add_option("--seed", pow.seed, "master seed");
  pow_cmd->add_option("--out", pow_out, "power table CSV path")->required();
  pow_cmd->add_option("--pvalues-out", pow_pvals, "p-value CDF CSV path");
  pow_cmd->add_option("--per-seed-out", pow_seeds, "per-replicate estimates CSV path");
  pow_cmd->callback([&] {
    const aniso::PowerResult result = aniso::run_calibration_power(pow);
    write_text(pow_out, power_table_csv(result.rows));
    if (!pow_pvals.empty()) write_text(pow_pvals, pvalue_cdf_csv(result.series));
    if (!pow_seeds.empty()) write_text(pow_seeds, per_seed_csv(result.seed_rows));
    const json config{{"kappas", pow.kappas}, {"levels", pow.levels},
                      {"blocks", pow.blocks}, {"reps", pow.n_reps},
                      {"rows", pow.grid_rows}, {"cols", pow.grid_cols},
                      {"domain", pow.domain}, {"theta0", pow.theta0},
                      {"points", pow.target_points}, {"null_sims", pow.n_null_sims},
                      {"out", pow_out},       {"pvalues_out", pow_pvals},
                      {"n_errors", result.n_errors}};
    write_text(pow_out + ".manifest.json",
               aniso::make_manifest("power", config, pow.seed).dump(2) + "\n");
  });

  // --- invert-hd ---------------------------------------------------------------
  auto* inv_cmd = app.add_subcommand("invert-hd", "invert Palm normalized-gradient eigenvalues");
  struct {
    std::vector<double> z;
    std::string z_file;
    std::string out;
    double box_a = 0.0, box_b = 0.0;
    double cond = 3.0;
    double tol = 1e-10;
    std::uint64_t max_iter = 20000000;
  } inv;
  inv_cmd->add_option("--z", inv.z, "eigenvalue vector, comma separated")->delimiter(',');
  inv_cmd->add_option("--z-file", inv.z_file, "JSON file holding the eigenvalue array");
  inv_cmd->add_option("--box-a", inv.box_a, "box lower bound (default from --cond)");
  inv_cmd->add_option("--box-b", inv.box_b, "box upper bound (default from --cond)");
  inv_cmd->add_option("--cond", inv.cond, "conditioning guess r for the default box");
  inv_cmd->add_option("--tol", inv.tol, "gradient-norm tolerance");
  inv_cmd->add_option("--max-iter", inv.max_iter, "iteration cap");
  inv_cmd->add_option("--out", inv.out, "output JSON path (default stdout)");
  inv_cmd->callback([&] {
    std::vector<double> z = inv.z;
    if (!inv.z_file.empty()) {
      std::ifstream in(inv.z_file);
      if (!in) throw aniso::PreconditionError("cannot open " + inv.z_file);
      json parsed = json::parse(in);
      z = parsed.get<std::vector<double>>();
    }
    if (z.size() < 2) throw aniso::PreconditionError("need a Z vector of dimension >= 2");
    const aniso::Box box = (inv.box_a > 0.0 && inv.box_b > inv.box_a)
                               ? aniso::Box{inv.box_a, inv.box_b}
                               : aniso::default_box(inv.cond);
    const auto quad = aniso::make_sphere_quadrature(static_cast<int>(z.size()));
    const auto result = aniso::invert_palm(z, box, quad, inv.tol, inv.max_iter);
    json out{{"pi_hat", result.pi_hat}, {"report", aniso::to_json(result.report)}};
    if (result.report.converged) {
      out["kappa_hat"] = result.kappa_hat.values;
      out["permutation"] = result.permutation;
    }
    const json config{{"z", z},
                      {"box_a", box.a},
                      {"box_b", box.b},
                      {"tol", inv.tol},
                      {"max_iter", inv.max_iter}};
    emit_json(out, aniso::make_manifest("invert-hd", config, 0), inv.out);
    if (!result.report.converged)
      throw aniso::NonConvergenceError("inversion did not reach tolerance");
  });

  // --- link-table ---------------------------------------------------------------
  auto* link_cmd = app.add_subcommand("link-table", "dump (kappa, g, R) CSV");
  struct {
    std::size_t n = 200;
    std::string out;
  } link;
  link_cmd->add_option("--n", link.n, "number of knots");
  link_cmd->add_option("--out", link.out, "CSV path (default stdout)");
  link_cmd->callback([&] {
    const auto tg = aniso::build_link_table(aniso::LinkKind::G, link.n);
    std::string csv = "kappa,g,R\n";
    char line[128];
    for (const auto& [kappa, g] : tg.knots) {
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", kappa, g,
                    aniso::R_of_kappa(kappa));
      csv += line;
    }
    if (link.out.empty()) {
      std::cout << csv;
    } else {
      write_text(link.out, csv);
      const json config{{"n", link.n}, {"out", link.out}};
      write_text(link.out + ".manifest.json",
                 aniso::make_manifest("link-table", config, 0).dump(2) + "\n");
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const aniso::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const aniso::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
