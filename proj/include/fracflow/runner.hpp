#ifndef FRACFLOW_RUNNER_HPP
#define FRACFLOW_RUNNER_HPP

#include <filesystem>
#include <iostream>

#include "fracflow/analysis.hpp"
#include "fracflow/config.hpp"
#include "fracflow/csv.hpp"

namespace fracflow {

/// Configuration-driven scenario runner behind the CLI. Returns the
/// process exit status; on failure a single machine-greppable line
/// starting with "FAIL" goes to `log`.
class Runner {
 public:
  Runner(const Config& cfg, std::ostream& log) : cfg_(cfg), log_(log) {}

  int run() {
    try {
      return dispatch();
    } catch (const ConfigError& e) {
      log_ << "FAIL config: " << e.what() << "\n";
      return 2;
    } catch (const StructuralError& e) {
      log_ << "FAIL structural: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      log_ << "FAIL " << e.what() << "\n";
      return 1;
    }
  }

 private:
  const Config& cfg_;
  std::ostream& log_;
  std::filesystem::path outdir_;
  std::vector<CsvRow> solve_rows_;

  static const std::vector<std::string>& solve_schema() {
    // No wall-clock column: CSV outputs are byte-reproducible by contract.
    static const std::vector<std::string> s = {
        "scenario",  "index",     "iterations", "residual_flux", "residual_mass",
        "norm_u_02", "norm_u_03", "norm_p_032", "converged"};
    return s;
  }

  void record_solve(const std::string& scenario, long long index, const SolveReport& rep) {
    solve_rows_.push_back(CsvRow{
        scenario, index, static_cast<long long>(rep.iterations),
        rep.residual_flux_history.empty() ? 0.0 : rep.residual_flux_history.back(),
        rep.residual_mass_history.empty() ? 0.0 : rep.residual_mass_history.back(),
        rep.norm_u_02, rep.norm_u_03, rep.norm_p_032,
        static_cast<long long>(rep.converged ? 1 : 0)});
  }

  Mesh make_mesh(bool fractured) const {
    Rect r{cfg_.get_double("mesh", "x0", 0.0), cfg_.get_double("mesh", "x1", 2.0),
           cfg_.get_double("mesh", "y0", 0.0), cfg_.get_double("mesh", "y1", 1.0)};
    int nx = cfg_.get_int("mesh", "nx", 16);
    int ny = cfg_.get_int("mesh", "ny", 8);
    Mesh m = fractured
                 ? build_mesh(r, cfg_.get_double("mesh", "fracture_x", 1.0), nx, ny)
                 : build_mesh_plain(r, nx, ny);
    for (int i = 0; i < cfg_.get_int("mesh", "refinements", 0); ++i) m = refine(m);
    return m;
  }

  static FlowLaw parse_law(const std::string& s, const char* key) {
    if (s == "darcy") return FlowLaw::Darcy;
    if (s == "darcy_forchheimer" || s == "forchheimer") return FlowLaw::DarcyForchheimer;
    throw ConfigError(std::string(key) + ": unknown law '" + s +
                      "' (expected darcy | darcy_forchheimer)");
  }

  ProblemData make_data() const {
    ProblemData d;
    d.alpha1 = TensorField::constant(cfg_.get_double("data", "alpha1", 1.0));
    d.alpha2 = TensorField::constant(cfg_.get_double("data", "alpha2", 1.0));
    d.alpha_gamma = ScalarField::constant(cfg_.get_double("data", "alpha_gamma", 1.0), true);
    d.beta1 = ScalarField::constant(cfg_.get_double("data", "beta1", 0.0));
    d.beta2 = ScalarField::constant(cfg_.get_double("data", "beta2", 0.0));
    d.beta_gamma = ScalarField::constant(cfg_.get_double("data", "beta_gamma", 1.0));
    d.kappa = ScalarField::constant(cfg_.get_double("data", "kappa", 1.0), true);
    d.xi = cfg_.get_double("data", "xi", 0.75);
    d.law1 = parse_law(cfg_.get_string("data", "law1", "darcy"), "law1");
    d.law2 = parse_law(cfg_.get_string("data", "law2", "darcy"), "law2");
    d.law_gamma =
        parse_law(cfg_.get_string("data", "law_gamma", "darcy_forchheimer"), "law_gamma");
    d.q1 = {cfg_.get_double("data", "q1", 0.0)};
    d.q2 = {cfg_.get_double("data", "q2", 0.0)};
    d.q_gamma = {cfg_.get_double("data", "q_gamma", 0.0)};
    return d;
  }

  /// Per-side Dirichlet data (pd_left/right/top/bottom, pd_gamma_bottom/top),
  /// expanded to per-edge values.
  void fill_dirichlet(const Mesh& mesh, ProblemData& d) const {
    double c = cfg_.get_double("data", "pd", 0.0);
    double left = cfg_.get_double("data", "pd_left", c);
    double right = cfg_.get_double("data", "pd_right", c);
    double top = cfg_.get_double("data", "pd_top", c);
    double bottom = cfg_.get_double("data", "pd_bottom", c);
    d.p_d1.assign(mesh.edges.size(), 0.0);
    d.p_d2.assign(mesh.edges.size(), 0.0);
    double tol = 1e-12 * std::max(mesh.domain.width(), mesh.domain.height());
    for (size_t e = 0; e < mesh.edges.size(); ++e) {
      const Edge& ed = mesh.edges[e];
      if (ed.kind != EdgeKind::Boundary) continue;
      Vec2 m = (mesh.vertices[ed.a] + mesh.vertices[ed.b]) * 0.5;
      double v;
      if (std::abs(m.x - mesh.domain.x0) < tol) v = left;
      else if (std::abs(m.x - mesh.domain.x1) < tol) v = right;
      else if (std::abs(m.y - mesh.domain.y1) < tol) v = top;
      else v = bottom;
      (mesh.triangles[ed.tri[0]].subdomain == 1 ? d.p_d1 : d.p_d2)[e] = v;
    }
    d.p_d_gamma[0] = cfg_.get_double("data", "pd_gamma_bottom", c);
    d.p_d_gamma[1] = cfg_.get_double("data", "pd_gamma_top", c);
  }

  SolverOptions make_options() const {
    SolverOptions o;
    o.tol_rel = cfg_.get_double("solver", "tol_rel", 1e-12);
    o.tol_abs = cfg_.get_double("solver", "tol_abs", 1e-13);
    o.max_iter = cfg_.get_int("solver", "max_iter", 50);
    o.damping = cfg_.get_double("solver", "damping", 1.0);
    std::string init = cfg_.get_string("solver", "initial_state", "darcy_solve");
    if (init == "zero") o.initial_state = InitialState::Zero;
    else if (init == "darcy_solve") o.initial_state = InitialState::DarcySolve;
    else throw ConfigError("solver.initial_state: expected zero | darcy_solve");
    std::string be = cfg_.get_string("solver", "backend", "direct_sparse");
    if (be == "direct_sparse") o.backend = LinearBackend::DirectSparse;
    else if (be == "uzawa") o.backend = LinearBackend::Uzawa;
    else throw ConfigError("solver.backend: expected direct_sparse | uzawa");
    return o;
  }

  int fail_validation(const std::vector<Violation>& v) {
    log_ << "FAIL validation:";
    for (const auto& viol : v) {
      log_ << " [" << viol.field;
      if (viol.entity >= 0) log_ << "#" << viol.entity;
      log_ << ": " << viol.message << "]";
    }
    log_ << "\n";
    return 3;
  }

  void write_fields(const Mesh& mesh, const MixedSpace& sp, const DiscreteState& state) {
    if (!cfg_.get_bool("output", "vtk", false)) return;
    std::vector<double> p(mesh.triangles.size());
    std::vector<Vec2> u(mesh.triangles.size());
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
      p[t] = state.p[t];
      u[t] = evaluate_flux(sp, state, static_cast<int>(t), mesh.centroid(static_cast<int>(t)));
    }
    std::ofstream os(outdir_ / "fields.vtk", std::ios::binary);
    write_vtk(mesh, os, &p, &u);
  }

  void maybe_dump_matrix(const SaddleSystem& sys) {
    if (!cfg_.get_bool("output", "matrix", false)) return;
    std::ofstream os(outdir_ / "system.mtx", std::ios::binary);
    write_matrix_market(sys.A_lin, sys.B, os);
  }

  UniformFlowParams uniform_flow_params(const Mesh& mesh, double beta) const {
    UniformFlowParams p;
    p.alpha1 = cfg_.get_double("data", "alpha1", 1.0);
    p.alpha2 = cfg_.get_double("data", "alpha2", 1.0);
    p.beta1 = beta;
    p.beta2 = beta;
    p.xi = cfg_.get_double("data", "xi", 0.75);
    if (mesh.has_fracture()) {
      p.kappa = cfg_.get_double("data", "kappa", 1.0);
      p.w1 = mesh.fracture_x - mesh.domain.x0;
      p.w2 = mesh.domain.x1 - mesh.fracture_x;
    } else {
      p.kappa = 0.0;
      p.w1 = mesh.domain.width();
      p.w2 = 0.0;
    }
    p.delta_p = cfg_.get_double("scenario", "delta_p", 3.0);
    p.p_left = cfg_.get_double("scenario", "p_left", 2.0);
    return p;
  }

  double fracture_flux_mean(const Mesh& mesh, const MixedSpace& sp,
                            const DiscreteState& state) const {
    double sum = 0.0, len = 0.0;
    for (int e : mesh.fracture_segments) {
      sum += state.u[sp.edge_dof_side1[e]];
      len += mesh.edges[e].length;
    }
    return sum / len;  // edge fluxes sum to U * |gamma| for a uniform trace
  }

  int dispatch() {
    std::string scenario = cfg_.require_string("scenario", "type");
    outdir_ = cfg_.get_string("output", "directory", ".");
    std::filesystem::create_directories(outdir_);

    int rc;
    if (scenario == "solve") rc = run_solve();
    else if (scenario == "uniform-flow") rc = run_uniform_flow();
    else if (scenario == "beta-sweep") rc = run_beta_sweep();
    else if (scenario == "mms") rc = run_mms();
    else if (scenario == "infsup") rc = run_infsup();
    else if (scenario == "inequalities") rc = run_inequalities();
    else throw ConfigError("unknown scenario type: " + scenario);

    emit_csv(solve_rows_, solve_schema(), (outdir_ / "solve.csv").string());
    return rc;
  }

  int run_solve() {
    Mesh mesh = make_mesh(true);
    ProblemData d = make_data();
    fill_dirichlet(mesh, d);
    auto viols = validate(d, mesh);
    if (!viols.empty()) return fail_validation(viols);

    MixedSpace sp = build_space(mesh);
    auto [state, rep] = solve_picard(sp, d, make_options());
    record_solve("solve", 0, rep);
    if (!rep.converged) {
      log_ << "FAIL solver: " << rep.message << "\n";
      return 4;
    }
    NormBundle nb = compute_norms(sp, state);
    std::vector<CsvRow> rows{{nb.u_02(), nb.u_03(), nb.p_032(), nb.div_02(), nb.trace_02(),
                              static_cast<long long>(rep.iterations)}};
    emit_csv(rows, {"norm_u_02", "norm_u_03", "norm_p_032", "norm_div_02", "norm_trace_02",
                    "iterations"},
             (outdir_ / "report.csv").string());
    write_fields(mesh, sp, state);
    maybe_dump_matrix(assemble_linear(sp, d));
    log_ << "solve: converged in " << rep.iterations << " iterations\n";
    return 0;
  }

  int run_uniform_flow() {
    Mesh mesh = make_mesh(true);
    double beta = cfg_.get_double("data", "beta1", 0.0);
    UniformFlowParams params = uniform_flow_params(mesh, beta);
    UniformFlowSolution oracle = uniform_flow_oracle(params);
    FlowLaw mlaw = beta > 0 ? FlowLaw::DarcyForchheimer : FlowLaw::Darcy;
    ProblemData d = build_uniform_flow_data(mesh, oracle, mlaw,
                                            cfg_.get_double("data", "alpha_gamma", 1.0),
                                            cfg_.get_double("data", "beta_gamma", 1.0),
                                            FlowLaw::DarcyForchheimer);
    auto viols = validate(d, mesh);
    if (!viols.empty()) return fail_validation(viols);

    MixedSpace sp = build_space(mesh);
    auto [state, rep] = solve_picard(sp, d, make_options());
    record_solve("uniform-flow", 0, rep);
    if (!rep.converged) {
      log_ << "FAIL solver: " << rep.message << "\n";
      return 4;
    }
    double U_fem = fracture_flux_mean(mesh, sp, state);
    double p_gamma_fem = 0.0, len = 0.0;
    for (int k = 0; k < static_cast<int>(mesh.fracture_segments.size()); ++k) {
      double l = mesh.edges[mesh.fracture_segments[k]].length;
      p_gamma_fem += state.p[sp.pressure_dof_of_segment(k)] * l;
      len += l;
    }
    p_gamma_fem /= len;
    std::vector<CsvRow> rows{{U_fem, oracle.U, std::abs(U_fem - oracle.U), p_gamma_fem,
                              oracle.p_gamma, static_cast<long long>(rep.iterations)}};
    emit_csv(rows,
             {"U_fem", "U_oracle", "abs_err", "p_gamma_fem", "p_gamma_oracle", "iterations"},
             (outdir_ / "report.csv").string());
    write_fields(mesh, sp, state);
    log_ << "uniform-flow: |U_fem - U_oracle| = " << std::abs(U_fem - oracle.U) << "\n";
    return 0;
  }

  int run_beta_sweep() {
    std::string variant = cfg_.get_string("scenario", "variant", "fractured");
    bool fractured = variant == "fractured";
    if (!fractured && variant != "single")
      throw ConfigError("scenario.variant: expected fractured | single");
    Mesh mesh = make_mesh(fractured);
    MixedSpace sp = fractured ? build_space(mesh) : build_space_single(mesh);

    std::vector<double> betas = cfg_.get_double_list("scenario", "betas");
    if (betas.empty())
      betas = {1e0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

    double beta_gamma = cfg_.get_double("data", "beta_gamma", 1.0);
    double alpha_gamma = cfg_.get_double("data", "alpha_gamma", 1.0);
    auto data_for = [&](double beta) {
      UniformFlowSolution sol = uniform_flow_oracle(uniform_flow_params(mesh, beta));
      FlowLaw mlaw = beta > 0 ? FlowLaw::DarcyForchheimer : FlowLaw::Darcy;
      FlowLaw glaw = fractured ? FlowLaw::DarcyForchheimer : FlowLaw::Darcy;
      return build_uniform_flow_data(mesh, sol, mlaw, alpha_gamma,
                                     fractured ? beta_gamma : 0.0, glaw);
    };

    SweepResult res = beta_sweep(sp, betas,
                                 fractured ? SweepScenario::Fractured
                                           : SweepScenario::SingleDomain,
                                 data_for, make_options());
    std::vector<CsvRow> rows;
    for (size_t i = 0; i < res.rows.size(); ++i) {
      const auto& r = res.rows[i];
      rows.push_back(CsvRow{r.beta, r.dist_target, r.b13_u03, r.b12_u03, r.p_032,
                            r.mass_residual, static_cast<long long>(r.iterations)});
      record_solve("beta-sweep", static_cast<long long>(i), res.reports[i]);
    }
    emit_csv(rows,
             {"beta", "dist_target_u02", "b13_u03", "b12_u03", "p_032", "mass_residual",
              "iterations"},
             (outdir_ / "report.csv").string());
    if (!res.complete) {
      log_ << "FAIL sweep: " << res.message << " (partial results written)\n";
      return 4;
    }
    log_ << "beta-sweep (" << variant << "): " << res.rows.size() << " rows\n";
    return 0;
  }

  int run_mms() {
    std::string mcase = cfg_.get_string("scenario", "case", "darcy");
    ManufacturedSolution ms;
    if (mcase == "darcy") ms = make_mms_darcy();
    else if (mcase == "forchheimer")
      ms = make_mms_forchheimer(cfg_.get_double("scenario", "beta", 1.0));
    else throw ConfigError("scenario.case: expected darcy | forchheimer");

    Rect r{cfg_.get_double("mesh", "x0", 0.0), cfg_.get_double("mesh", "x1", 2.0),
           cfg_.get_double("mesh", "y0", 0.0), cfg_.get_double("mesh", "y1", 1.0)};
    double xf = cfg_.get_double("mesh", "fracture_x", 1.0);
    if (r.x0 != 0.0 || r.x1 != 2.0 || r.y0 != 0.0 || r.y1 != 1.0 || xf != 1.0)
      throw ConfigError("mms: built-in cases require domain (0,2)x(0,1), fracture_x = 1");
    Mesh base = build_mesh(r, xf, cfg_.get_int("mesh", "nx", 8), cfg_.get_int("mesh", "ny", 4));

    int meshes = cfg_.get_int("scenario", "meshes", 4);
    RateTable table = mms_convergence(base, ms, meshes, make_options());
    std::vector<CsvRow> rows;
    for (const auto& row : table.rows)
      rows.push_back(CsvRow{row.h, row.flux_l2, row.pressure_l2, table.slope_flux,
                            table.slope_pressure});
    emit_csv(rows, {"h", "flux_l2_error", "pressure_l2_error", "slope_flux", "slope_pressure"},
             (outdir_ / "report.csv").string());
    if (!table.monotone) {
      log_ << "FAIL mms: non-monotone error decay\n";
      return 4;
    }
    log_ << "mms (" << mcase << "): slopes " << table.slope_flux << " / "
         << table.slope_pressure << "\n";
    return 0;
  }

  int run_infsup() {
    std::vector<int> nxs = cfg_.get_int_list("scenario", "nx_list");
    if (nxs.empty()) nxs = {2, 4, 8};
    Rect r{cfg_.get_double("mesh", "x0", 0.0), cfg_.get_double("mesh", "x1", 2.0),
           cfg_.get_double("mesh", "y0", 0.0), cfg_.get_double("mesh", "y1", 1.0)};
    double xf = cfg_.get_double("mesh", "fracture_x", 1.0);
    std::vector<CsvRow> rows;
    for (int nx : nxs) {
      int ny = std::max(1, nx / 2);
      Mesh mesh = build_mesh(r, xf, nx, ny);
      MixedSpace sp = build_space(mesh);
      double theta = discrete_infsup(sp);
      rows.push_back(CsvRow{static_cast<long long>(nx), static_cast<long long>(ny), mesh.h,
                            theta});
    }
    emit_csv(rows, {"nx", "ny", "h", "theta_h"}, (outdir_ / "report.csv").string());
    log_ << "infsup: " << rows.size() << " meshes\n";
    return 0;
  }

  int run_inequalities() {
    long samples = cfg_.get_int("scenario", "samples", 100000);
    unsigned long long seed =
        static_cast<unsigned long long>(cfg_.get_int("scenario", "seed", 20240801));
    InequalityReport rep = check_vector_inequalities(samples, {1, 2, 3}, seed);
    static const char* names[4] = {"growth_bound", "monotonicity_cubed", "holder_half",
                                   "inverse_sqrt_pairing"};
    std::vector<CsvRow> rows;
    for (int i = 0; i < 4; ++i)
      rows.push_back(CsvRow{std::string(names[i]), static_cast<long long>(rep.checked[i]),
                            static_cast<long long>(rep.violations[i])});
    emit_csv(rows, {"inequality", "checked", "violations"},
             (outdir_ / "report.csv").string());
    if (rep.total_violations() != 0) {
      log_ << "FAIL inequalities: " << rep.total_violations() << " violations\n";
      return 4;
    }
    log_ << "inequalities: 0 violations over " << rep.checked[0] << " pairs per inequality\n";
    return 0;
  }
};

inline int run_config(const std::string& config_path, std::ostream& log) {
  Config cfg = Config::parse_file(config_path);
  return Runner(cfg, log).run();
}

}  // namespace fracflow

#endif  // FRACFLOW_RUNNER_HPP
