// Command-line front end: batch experiment runner with deterministic
// seeding. Every run prints one JSON record to stdout that embeds the fully
// resolved configuration (defaults included), so any output can be replayed
// bit-for-bit from the record alone.
//
// Exit codes: 0 success, 2 configuration or parameter error, 3 a numerical
// failure report (invariant form not found, limit map not converged, no
// trapping radius above the floor), 4 I/O failure.

#include <complex>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "germlab/germlab.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

int thread_count_from_env() {
  const char* raw = std::getenv("GERMLAB_THREADS");
  if (!raw) return 1;
  const int v = std::atoi(raw);
  return v > 0 ? v : 1;
}

/// Point syntax: comma-separated components, each "re" or "re:im".
Eigen::VectorXcd parse_point(const std::string& text) {
  std::vector<germlab::Complex> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      parts.emplace_back(std::stod(item), 0.0);
    } else {
      parts.emplace_back(std::stod(item.substr(0, colon)),
                         std::stod(item.substr(colon + 1)));
    }
  }
  if (parts.empty()) throw std::invalid_argument("empty point literal");
  Eigen::VectorXcd z(static_cast<long>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) z[static_cast<long>(i)] = parts[i];
  return z;
}

struct SystemInput {
  std::string example;
  std::string file;
  germlab::ExampleParams params;

  void add_options(CLI::App* cmd) {
    auto* ex = cmd->add_option("--example", example, "built-in example id (E1..E3, L1, L2, R1, R2)");
    auto* fi = cmd->add_option("--ensemble", file, "ensemble/spec file (json)");
    ex->excludes(fi);
    cmd->add_option("--lambda1", params.lambda1, "E1 linear part, in (0,1)");
    cmd->add_option("--theta", params.theta, "R1/R2 rotation angle, in (0,1)");
    cmd->add_option("--levels", params.levels, "R2 tent truncation depth (<= 12)");
    cmd->add_option("--cap", params.index_cap, "E1 index distribution cap");
  }

  json descriptor() const {
    if (!example.empty()) {
      return {{"example", example},
              {"lambda1", params.lambda1},
              {"theta", params.theta},
              {"levels", params.levels},
              {"cap", params.index_cap}};
    }
    return {{"file", file}};
  }

  bool empty() const { return example.empty() && file.empty(); }

  /// Load as a cocycle spec; germ inputs push forward through linear parts.
  germlab::CocycleSpec load_cocycle() const {
    if (!example.empty()) {
      const auto id = germlab::parse_example_id(example);
      auto built = germlab::build_example(id, params);
      if (std::holds_alternative<germlab::CocycleSpec>(built)) {
        return std::get<germlab::CocycleSpec>(built);
      }
      return germlab::CocycleSpec(
          std::get<germlab::GermEnsemble>(built).linear_part_ensemble());
    }
    const json j = germlab::load_json_file(file);
    if (j.contains("rotation") || (j.contains("atoms") && !j.at("atoms").empty() &&
                                   j.at("atoms").front().contains("matrix"))) {
      return germlab::cocycle_spec_from_json(j);
    }
    return germlab::CocycleSpec(germlab::germ_ensemble_from_json(j).linear_part_ensemble());
  }

  /// Load as a germ ensemble; linear cocycle atoms become linear jets.
  germlab::GermEnsemble load_germ() const {
    if (!example.empty()) {
      const auto id = germlab::parse_example_id(example);
      auto built = germlab::build_example(id, params);
      if (std::holds_alternative<germlab::GermEnsemble>(built)) {
        return std::get<germlab::GermEnsemble>(built);
      }
      const auto& spec = std::get<germlab::CocycleSpec>(built);
      if (!spec.is_iid())
        throw std::invalid_argument("rotation examples have no germ-ensemble form");
      return germlab::to_germ_ensemble(spec.ensemble());
    }
    const json j = germlab::load_json_file(file);
    if (j.contains("rotation"))
      throw std::invalid_argument("rotation specs have no germ-ensemble form");
    if (j.contains("atoms") && !j.at("atoms").empty() &&
        j.at("atoms").front().contains("matrix")) {
      return germlab::to_germ_ensemble(germlab::matrix_ensemble_from_json(j));
    }
    return germlab::germ_ensemble_from_json(j);
  }
};

void emit_record(const json& record, const std::string& out_path) {
  std::cout << record.dump(2) << std::endl;
  if (!out_path.empty()) germlab::save_json_file(out_path, record);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"germlab: random local complex dynamics laboratory"};
  app.require_subcommand(1);
  const int threads = thread_count_from_env();

  // Shared knobs (registered per subcommand; defaults echoed in records).
  std::uint64_t seed = 1;
  long n = 10000;
  long trials = 100;
  std::string out_path;
  std::string csv_path;

  SystemInput lyap_in, spec_in, cls_in, inv_in, orbit_in, fatou_in, trap_in, lim_in,
      stable_in, example_in;

  auto* lyap = app.add_subcommand("lyapunov", "top Lyapunov exponent estimate");
  lyap_in.add_options(lyap);
  lyap->add_option("--n", n);
  lyap->add_option("--trials", trials);
  lyap->add_option("--seed", seed);
  lyap->add_option("--out", out_path);

  auto* spectrum = app.add_subcommand("spectrum", "Lyapunov spectrum estimate");
  double gap_threshold = 0.05;
  spec_in.add_options(spectrum);
  spectrum->add_option("--n", n);
  spectrum->add_option("--trials", trials);
  spectrum->add_option("--seed", seed);
  spectrum->add_option("--gap", gap_threshold, "multiplicity grouping threshold");
  spectrum->add_option("--out", out_path);

  auto* classify = app.add_subcommand("classify", "attracting/repelling/neutral/semi-neutral verdict");
  double eps_abs = 1e-3;
  cls_in.add_options(classify);
  classify->add_option("--n", n);
  classify->add_option("--trials", trials);
  classify->add_option("--seed", seed);
  classify->add_option("--eps-abs", eps_abs, "zero-test band half-width");
  classify->add_option("--out", out_path);

  auto* invariant = app.add_subcommand("invariant-form", "common invariant Hermitian form search");
  long max_iters = 10000;
  double inv_tol = 1e-8;
  inv_in.add_options(invariant);
  invariant->add_option("--max-iters", max_iters);
  invariant->add_option("--tol", inv_tol);
  invariant->add_option("--out", out_path);

  auto* orbit = app.add_subcommand("orbit", "simulate one random orbit");
  std::string z0_text = "0.1";
  long steps = 10000;
  orbit_in.add_options(orbit);
  orbit->add_option("--z0", z0_text, "start point, components 're' or 're:im', comma separated");
  orbit->add_option("--steps", steps);
  orbit->add_option("--seed", seed);
  orbit->add_option("--csv", csv_path, "write the orbit as csv");
  orbit->add_option("--out", out_path);

  auto* fatou = app.add_subcommand("fatou", "random-Fatou membership statistics");
  double delta = 0.05;
  long test_points = 10;
  fatou_in.add_options(fatou);
  fatou->add_option("--delta", delta);
  fatou->add_option("--points", test_points);
  fatou->add_option("--steps", steps);
  fatou->add_option("--trials", trials);
  fatou->add_option("--seed", seed);
  fatou->add_option("--out", out_path);

  auto* trap = app.add_subcommand("trap", "attracting trapping radius");
  double trap_eps = -1.0;
  long boundary_samples = 2000;
  trap_in.add_options(trap);
  trap->add_option("--epsilon", trap_eps, "contraction margin (default: bisected)");
  trap->add_option("--samples", boundary_samples);
  trap->add_option("--seed", seed);
  trap->add_option("--out", out_path);

  auto* limit = app.add_subcommand("limit-map", "limit map estimate on a grid");
  double rho = 0.1;
  int grid_size = 33;
  long stride = 50;
  double cauchy_tol = 1e-6;
  long max_n = 10000;
  lim_in.add_options(limit);
  limit->add_option("--rho", rho);
  limit->add_option("--grid", grid_size);
  limit->add_option("--stride", stride);
  limit->add_option("--cauchy-tol", cauchy_tol);
  limit->add_option("--max-n", max_n);
  limit->add_option("--seed", seed);
  limit->add_option("--csv", csv_path, "write grid values and singular values as csv");
  limit->add_option("--out", out_path);

  auto* stable = app.add_subcommand("stable-set", "level set of the limit map");
  std::string z_text = "0.1,0.05";
  double level_tol = 1e-4;
  stable_in.add_options(stable);
  stable->add_option("--z", z_text, "base point");
  stable->add_option("--level-tol", level_tol);
  stable->add_option("--rho", rho);
  stable->add_option("--grid", grid_size);
  stable->add_option("--stride", stride);
  stable->add_option("--cauchy-tol", cauchy_tol);
  stable->add_option("--max-n", max_n);
  stable->add_option("--seed", seed);
  stable->add_option("--csv", csv_path, "write the level-set points as csv");
  stable->add_option("--out", out_path);

  auto* example = app.add_subcommand("example", "emit a built-in example as a spec file");
  std::string example_out;
  example_in.add_options(example);
  example->add_option("--out", example_out, "destination file")->required();

  auto* brjuno = app.add_subcommand("brjuno", "continued-fraction partial sums");
  double alpha = 0.6180339887498949;
  int depth = 20;
  brjuno->add_option("--alpha", alpha);
  brjuno->add_option("--depth", depth);
  brjuno->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (lyap->parsed()) {
      if (lyap_in.empty()) throw std::invalid_argument("need --example or --ensemble");
      auto est = germlab::lyapunov_exponent(lyap_in.load_cocycle(), n, trials, seed, threads);
      json rec = germlab::exponent_to_json(est);
      rec["op"] = "lyapunov";
      rec["source"] = lyap_in.descriptor();
      emit_record(rec, out_path);
    } else if (spectrum->parsed()) {
      if (spec_in.empty()) throw std::invalid_argument("need --example or --ensemble");
      auto s = germlab::lyapunov_spectrum(spec_in.load_cocycle(), n, trials, seed,
                                          gap_threshold, threads);
      json rec = germlab::spectrum_to_json(s);
      rec["op"] = "spectrum";
      rec["source"] = spec_in.descriptor();
      emit_record(rec, out_path);
    } else if (classify->parsed()) {
      if (cls_in.empty()) throw std::invalid_argument("need --example or --ensemble");
      // Germ inputs go through the germ classifier (identical result to the
      // pushed-forward matrix ensemble, by construction).
      germlab::Classification c;
      bool via_germ = false;
      if (!cls_in.example.empty()) {
        const auto id = germlab::parse_example_id(cls_in.example);
        auto built = germlab::build_example(id, cls_in.params);
        if (std::holds_alternative<germlab::GermEnsemble>(built)) {
          c = germlab::classify_germ_measure(std::get<germlab::GermEnsemble>(built), n,
                                             trials, seed, eps_abs, threads);
          via_germ = true;
        }
      }
      if (!via_germ) {
        c = germlab::classify_ensemble(cls_in.load_cocycle(), n, trials, seed, eps_abs,
                                       threads);
      }
      json rec = germlab::classification_to_json(c);
      rec["op"] = "classify";
      rec["source"] = cls_in.descriptor();
      emit_record(rec, out_path);
    } else if (invariant->parsed()) {
      if (inv_in.empty()) throw std::invalid_argument("need --example or --ensemble");
      auto spec = inv_in.load_cocycle();
      if (!spec.is_iid())
        throw std::invalid_argument("invariant-form needs a finite generator list");
      std::vector<Eigen::MatrixXcd> gens;
      for (std::size_t i = 0; i < spec.ensemble().size(); ++i) {
        gens.push_back(spec.ensemble().atom(i));
      }
      auto res = germlab::find_invariant_form(gens, max_iters, inv_tol);
      json form = json::array();
      for (int r = 0; r < res.form.rows(); ++r) {
        json row = json::array();
        for (int cidx = 0; cidx < res.form.cols(); ++cidx) {
          row.push_back({res.form(r, cidx).real(), res.form(r, cidx).imag()});
        }
        form.push_back(row);
      }
      json rec = {{"op", "invariant-form"},
                  {"source", inv_in.descriptor()},
                  {"success", res.success},
                  {"residual", res.residual},
                  {"condition", res.condition},
                  {"iterations", res.iterations},
                  {"tol", inv_tol},
                  {"max_iters", max_iters},
                  {"form", form},
                  {"residual_trajectory", res.residual_trajectory}};
      emit_record(rec, out_path);
      if (!res.success) return kExitNumerical;
    } else if (orbit->parsed()) {
      if (orbit_in.empty()) throw std::invalid_argument("need --example or --ensemble");
      auto germ = orbit_in.load_germ();
      auto z0 = parse_point(z0_text);
      auto rec_orbit = germlab::simulate_orbit(germ, z0, steps, seed);
      json rec = {{"op", "orbit"},
                  {"source", orbit_in.descriptor()},
                  {"z0", z0_text},
                  {"steps", steps},
                  {"seed", seed},
                  {"escaped", rec_orbit.escape_step.has_value()},
                  {"max_norm", rec_orbit.max_norm},
                  {"thinning", rec_orbit.thinning}};
      if (rec_orbit.escape_step) rec["escape_step"] = *rec_orbit.escape_step;
      if (!csv_path.empty()) {
        germlab::write_text_file(csv_path, germlab::orbit_to_csv(rec_orbit));
        rec["csv"] = csv_path;
      }
      emit_record(rec, out_path);
    } else if (fatou->parsed()) {
      if (fatou_in.empty()) throw std::invalid_argument("need --example or --ensemble");
      auto rep = germlab::fatou_membership(fatou_in.load_germ(), delta, test_points, steps,
                                           trials, seed, threads);
      json rec = germlab::fatou_to_json(rep);
      rec["op"] = "fatou";
      rec["source"] = fatou_in.descriptor();
      emit_record(rec, out_path);
    } else if (trap->parsed()) {
      if (trap_in.empty()) throw std::invalid_argument("need --example or --ensemble");
      std::optional<double> eps_opt;
      if (trap_eps > 0.0) eps_opt = trap_eps;
      germlab::TrappingReport rep;
      try {
        rep = germlab::trapping_radius(trap_in.load_germ(), eps_opt, boundary_samples, seed);
      } catch (const std::runtime_error& e) {
        json rec = {{"op", "trap"}, {"source", trap_in.descriptor()}, {"error", e.what()}};
        emit_record(rec, out_path);
        return kExitNumerical;
      }
      json table = json::array();
      for (const auto& b : rep.table) {
        table.push_back({{"linear_norm", b.linear_norm},
                         {"alpha", b.alpha},
                         {"remainder_slope", b.remainder_slope},
                         {"mc_max_ratio", b.mc_max_ratio}});
      }
      json rec = {{"op", "trap"},
                  {"source", trap_in.descriptor()},
                  {"epsilon", rep.epsilon},
                  {"radius", rep.radius},
                  {"expected_log_alpha", rep.expected_log_alpha},
                  {"boundary_samples", rep.boundary_samples},
                  {"violations", rep.violations},
                  {"seed", rep.seed},
                  {"table", table}};
      emit_record(rec, out_path);
    } else if (limit->parsed() || stable->parsed()) {
      SystemInput& input = limit->parsed() ? lim_in : stable_in;
      if (input.empty()) throw std::invalid_argument("need --example or --ensemble");
      auto est = germlab::limit_map_estimate(input.load_germ(), seed, rho, grid_size, stride,
                                             cauchy_tol, max_n);
      json rec = {{"op", limit->parsed() ? "limit-map" : "stable-set"},
                  {"source", input.descriptor()},
                  {"seed", seed},
                  {"rho", rho},
                  {"grid", grid_size},
                  {"stride", stride},
                  {"cauchy_tol", cauchy_tol},
                  {"max_n", max_n},
                  {"converged", est.converged},
                  {"escaped", est.escaped},
                  {"cauchy_defect", est.cauchy_defect},
                  {"n_first", est.n_first},
                  {"n_second", est.n_second},
                  {"defect_trajectory", est.defect_trajectory}};
      if (!est.converged) {
        emit_record(rec, out_path);
        return kExitNumerical;
      }
      if (limit->parsed()) {
        auto profile = germlab::rank_profile(est);
        rec["degenerate"] = profile.degenerate;
        rec["nonvanishing"] = profile.nonvanishing;
        rec["sigma1_at_origin"] = profile.sigma1_at_origin;
        rec["max_sigma_min"] = profile.max_sigma_min;
        if (!csv_path.empty()) {
          std::string csv = "x,y,re_g1,im_g1,re_g2,im_g2,sigma1,sigma2\n";
          for (std::size_t i = 0; i < est.grid.size(); ++i) {
            const auto& sv = profile.singular_values[i];
            csv += germlab::format_replay(est.grid[i][0].real()) + "," +
                   germlab::format_replay(est.grid[i][1].real()) + "," +
                   germlab::format_replay(est.values[i][0].real()) + "," +
                   germlab::format_replay(est.values[i][0].imag()) + "," +
                   germlab::format_replay(est.values[i][1].real()) + "," +
                   germlab::format_replay(est.values[i][1].imag()) + "," +
                   germlab::format_replay(sv(0)) + "," + germlab::format_replay(sv(1)) + "\n";
          }
          germlab::write_text_file(csv_path, csv);
          rec["csv"] = csv_path;
        }
        emit_record(rec, out_path);
      } else {
        auto zq = parse_point(z_text);
        if (zq.size() != 2) throw std::invalid_argument("--z must have two components");
        Eigen::Vector2cd z2(zq[0], zq[1]);
        germlab::StableSetResult set;
        try {
          set = germlab::stable_set(est, z2, level_tol);
        } catch (const std::runtime_error& e) {
          rec["error"] = e.what();
          emit_record(rec, out_path);
          return kExitNumerical;
        }
        rec["z"] = z_text;
        rec["level_tol"] = level_tol;
        rec["points_found"] = set.points.size();
        rec["fit_residual"] = set.fit_residual;
        rec["line_point"] = {set.line_point(0), set.line_point(1)};
        rec["line_direction"] = {set.line_direction(0), set.line_direction(1)};
        if (!csv_path.empty()) {
          std::string csv = "x,y\n";
          for (const auto& p : set.points) {
            csv += germlab::format_replay(p[0].real()) + "," +
                   germlab::format_replay(p[1].real()) + "\n";
          }
          germlab::write_text_file(csv_path, csv);
          rec["csv"] = csv_path;
        }
        emit_record(rec, out_path);
      }
    } else if (example->parsed()) {
      if (example_in.example.empty()) throw std::invalid_argument("need --example");
      const auto id = germlab::parse_example_id(example_in.example);
      auto built = germlab::build_example(id, example_in.params);
      json payload;
      if (std::holds_alternative<germlab::GermEnsemble>(built)) {
        payload = germlab::germ_ensemble_to_json(std::get<germlab::GermEnsemble>(built));
      } else {
        payload = germlab::cocycle_spec_to_json(std::get<germlab::CocycleSpec>(built));
      }
      germlab::save_json_file(example_out, payload);
      json rec = {{"op", "example"},
                  {"example", germlab::example_name(id)},
                  {"written", example_out}};
      std::cout << rec.dump(2) << std::endl;
    } else if (brjuno->parsed()) {
      auto rep = germlab::brjuno_partial_sum(alpha, depth);
      json rec = {{"op", "brjuno"},
                  {"alpha", alpha},
                  {"depth", depth},
                  {"coefficients", rep.coefficients},
                  {"convergents_q", rep.convergents_q},
                  {"partial_sums", rep.partial_sums},
                  {"terminated", rep.terminated},
                  {"terminated_depth", rep.terminated_depth},
                  {"converged_heuristic", rep.converged_heuristic},
                  {"last_increment", rep.last_increment}};
      emit_record(rec, out_path);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitConfig;
  }
  return kExitOk;
}
