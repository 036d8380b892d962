#include "domelimit/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace dome {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_lambda(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string cell_text(SolveStatus st, double lambda, bool unstable) {
  if (unstable) return "unstable";
  if (st != SolveStatus::optimal) return status_name(st);
  return fmt_lambda(lambda);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path d(cfg.output.directory);
  fs::create_directories(d);
  return d;
}

json certificate_json(const CertificateDiagnostics& c) {
  return {{"ok", c.ok},
          {"equality_residual", c.equality_residual},
          {"worst_cone_margin", c.worst_cone_margin},
          {"dual_residual", c.dual_residual},
          {"strong_duality", c.strong_duality},
          {"normalization", c.normalization},
          {"degenerate", c.degenerate},
          {"failure", c.failure}};
}

}  // namespace

RunConfig apply_overrides(RunConfig cfg, const CliOverrides& o) {
  if (o.out_dir) cfg.output.directory = *o.out_dir;
  if (o.jobs) cfg.output.jobs = *o.jobs;
  if (o.amplitude) cfg.output.amplitude = *o.amplitude;
  if (o.export_program) cfg.output.program = true;
  cfg.spec.solver.verbose = o.verbose;
  cfg.validate();
  return cfg;
}

std::string csv_preamble(const RunConfig& cfg, const std::string& title) {
  std::ostringstream os;
  os << "# dome-limit " << title << '\n'
     << "# units: lengths in R, angles in degrees, thickness and rise as ratios to R, "
        "lambda = live load / self weight\n"
     << "# settings_hash: " << settings_hash_hex(cfg) << '\n'
     << "# config: " << dump_config(cfg) << '\n';
  return os.str();
}

void write_convergence_csv(std::ostream& os, const RunConfig& cfg,
                           const std::vector<ConvergenceCell>& cells) {
  const auto& meshes = cfg.study.meshes;
  const auto& nas = cfg.study.n_alphas;
  if (cells.size() != meshes.size() * nas.size())
    throw std::logic_error("convergence cells do not match the grid");
  os << csv_preamble(cfg, "convergence");
  os << "mesh,m,n";
  for (int na : nas) os << ",n_alpha_" << na;
  os << '\n';
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    os << meshes[i][0] << 'x' << meshes[i][1] << ',' << meshes[i][0] << ',' << meshes[i][1];
    for (std::size_t j = 0; j < nas.size(); ++j) {
      const auto& c = cells[i * nas.size() + j];
      const bool unstable =
          c.status == SolveStatus::infeasible || (c.status == SolveStatus::optimal && c.lambda <= 0);
      os << ',' << cell_text(c.status, c.lambda, unstable);
    }
    os << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const RunConfig& cfg, const std::vector<SweepPoint>& pts) {
  const auto& vals = cfg.study.values;
  const auto& modes = cfg.study.friction_modes;
  if (pts.size() != vals.size() * modes.size())
    throw std::logic_error("sweep points do not match the grid");
  os << csv_preamble(cfg, "sweep");
  os << sweep_variable_name(cfg.study.variable);
  for (auto m : modes) os << ',' << friction_mode_name(m);
  os << '\n';
  for (std::size_t i = 0; i < vals.size(); ++i) {
    os << fmt_lambda(vals[i]);
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const auto& p = pts[k * vals.size() + i];
      os << ',' << cell_text(p.status, p.lambda, p.unstable);
    }
    os << '\n';
  }
}

int exit_code(const LimitResult& r) {
  switch (r.report.status) {
    case SolveStatus::infeasible: return kExitInfeasible;
    case SolveStatus::unbounded: return kExitUnbounded;
    case SolveStatus::numerical_trouble: return kExitNumerical;
    case SolveStatus::optimal: break;
  }
  return r.certificate.ok ? kExitOk : kExitCertificate;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
  Mesh mesh;
  ConicProgram program;
  const LimitResult r = run_limit_analysis(cfg.spec, &mesh, &program);
  const fs::path dir = out_dir(cfg);
  const std::string hash = settings_hash_hex(cfg);

  json summary;
  summary["lambda"] = r.report.lambda;
  summary["status"] = status_name(r.report.status);
  summary["message"] = r.report.message;
  summary["gap"] = r.report.gap;
  summary["iterations"] = r.report.iterations;
  summary["timings"] = {{"assembly_seconds", r.assembly_seconds},
                        {"setup_seconds", r.report.setup_seconds},
                        {"solve_seconds", r.report.solve_seconds}};
  summary["certificate"] = certificate_json(r.certificate);
  summary["settings_hash"] = hash;
  summary["config"] = json::parse(dump_config(cfg));
  summary["mesh"] = {{"nodes", mesh.node_count()},
                     {"elements", mesh.element_count()},
                     {"cones", program.n_cones()}};
  if (r.mechanism) {
    summary["mechanism"] = {{"normalization", r.mechanism->normalization},
                            {"strong_duality", r.mechanism->strong_duality},
                            {"consistent", r.mechanism->consistent},
                            {"max_flow", r.mechanism->max_flow()},
                            {"crack_records", r.cracks.size()}};
  } else if (!r.mechanism_error.empty()) {
    summary["mechanism"] = {{"error", r.mechanism_error}};
  }
  {
    auto os = open_out(dir / "summary.json");
    os << summary.dump(2) << '\n';
  }
  if (r.mechanism && cfg.output.cracks) {
    auto os = open_out(dir / "cracks.csv");
    write_crack_table(os, r.cracks, csv_preamble(cfg, "crack pattern"));
  }
  if (r.mechanism && cfg.output.vtk) {
    auto os = open_out(dir / "mechanism.vtk");
    export_mechanism_vtk(os, *r.mechanism, mesh, cfg.output.amplitude);
  }
  if (cfg.output.program) {
    auto os = open_out(dir / "program.txt");
    export_program(os, program);
  }

  log << "lambda = " << fmt_lambda(r.report.lambda) << "  status = " << status_name(r.report.status)
      << "  iterations = " << r.report.iterations << "  solve = " << r.report.solve_seconds
      << " s\n";
  if (r.report.status == SolveStatus::optimal && !r.certificate.ok)
    log << "certificate failed: " << r.certificate.failure << '\n';
  if (!r.mechanism_error.empty()) log << r.mechanism_error << '\n';
  log << "results in " << dir.string() << '\n';
  return exit_code(r);
}

int cmd_study(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.has_study) throw ConfigError("config has no study block");
  const StudyBlock& st = cfg.study;
  const fs::path dir = out_dir(cfg);
  int code = kExitOk;
  auto note = [&](SolveStatus s, bool certified) {
    if (s == SolveStatus::numerical_trouble) code = kExitNumerical;
    else if (s == SolveStatus::optimal && !certified && code == kExitOk) code = kExitCertificate;
  };
  json summary;
  summary["kind"] = study_kind_name(st.kind);
  summary["settings_hash"] = settings_hash_hex(cfg);

  switch (st.kind) {
    case StudyKind::convergence: {
      const auto cells = convergence_study(cfg.spec, st.meshes, st.n_alphas, cfg.output.jobs);
      auto os = open_out(dir / "convergence.csv");
      write_convergence_csv(os, cfg, cells);
      json arr = json::array();
      for (const auto& c : cells) {
        note(c.status, c.certified);
        arr.push_back({{"m", c.m}, {"n", c.n}, {"n_alpha", c.n_alpha},
                       {"status", status_name(c.status)}, {"lambda", c.lambda},
                       {"iterations", c.iterations}, {"seconds", c.seconds},
                       {"certified", c.certified}});
      }
      summary["cells"] = arr;
      const auto bad = monotonicity_violations(cells);
      summary["monotone"] = bad.empty();
      summary["monotonicity_violations"] = bad;
      for (const auto& b : bad) log << "not monotone in n_alpha: " << b << '\n';
      break;
    }
    case StudyKind::sweep: {
      const auto pts =
          parametric_sweep(cfg.spec, st.variable, st.values, st.friction_modes, cfg.output.jobs);
      auto os = open_out(dir / "sweep.csv");
      write_sweep_csv(os, cfg, pts);
      for (const auto& p : pts) note(p.status, p.certified);
      break;
    }
    case StudyKind::min_thickness: {
      std::vector<double> vals = st.values;
      const bool swept = !vals.empty();
      if (!swept) vals.push_back(0.0);
      std::vector<ThicknessSearch> res(vals.size());
      parallel_for(static_cast<int>(vals.size()), cfg.output.jobs, [&](int i) {
        StudySpec s = cfg.spec;
        if (swept) set_sweep_variable(s, st.variable, vals[static_cast<std::size_t>(i)]);
        res[static_cast<std::size_t>(i)] =
            min_thickness_search(s, st.bracket[0], st.bracket[1], st.tolerance);
      });
      auto os = open_out(dir / "min_thickness.csv");
      os << csv_preamble(cfg, "min-thickness");
      os << (swept ? sweep_variable_name(st.variable) : "case")
         << ",min_thickness_ratio,largest_unstable_ratio,lambda,solves\n";
      for (std::size_t i = 0; i < vals.size(); ++i) {
        os << (swept ? fmt_lambda(vals[i]) : std::string("base")) << ','
           << fmt_lambda(res[i].thickness_ratio) << ',' << fmt_lambda(res[i].lower) << ','
           << fmt_lambda(res[i].lambda) << ',' << res[i].solves << '\n';
      }
      break;
    }
  }
  auto os = open_out(dir / "study_summary.json");
  os << summary.dump(2) << '\n';
  log << study_kind_name(st.kind) << " study written to " << dir.string() << '\n';
  return code;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Lower-bound limit analysis of masonry domes under horizontal loads"};
  app.require_subcommand(1);
  std::string config_path;
  CliOverrides ov;
  std::string out;
  int jobs = 0;
  double amplitude = -1.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--jobs", jobs, "concurrent sweep points")->check(CLI::PositiveNumber);
    sub->add_flag("--export-program", ov.export_program, "write the conic program as text");
    sub->add_option("--amplitude", amplitude, "mechanism export amplitude")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("-v,--verbose", ov.verbose, "print solver iterations");
  };
  auto* solve_cmd = app.add_subcommand("solve", "single limit analysis");
  auto* study_cmd = app.add_subcommand("study", "convergence, sweep or min-thickness study");
  add_common(solve_cmd);
  add_common(study_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  if (!out.empty()) ov.out_dir = out;
  if (jobs > 0) ov.jobs = jobs;
  if (amplitude >= 0.0) ov.amplitude = amplitude;

  try {
    const RunConfig cfg = apply_overrides(load_config(config_path), ov);
    if (solve_cmd->parsed()) return cmd_solve(cfg, std::cout);
    return cmd_study(cfg, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dome
