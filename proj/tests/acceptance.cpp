// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Criterion 8 shells out to the CLI binary given as
// argv[1].
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "fracflow/runner.hpp"

using namespace fracflow;
namespace fs = std::filesystem;

namespace {

const Rect kDomain{0.0, 2.0, 0.0, 1.0};
int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << detail
            << std::endl;
  if (!pass) ++g_failures;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// --- criterion 1: pointwise vector inequalities ---------------------------

void criterion_inequalities() {
  InequalityReport rep = check_vector_inequalities(100000, {1, 2, 3}, 20240801u, 1e-12);
  std::ostringstream os;
  os << "vector inequalities, " << rep.checked[0] << " pairs each, "
     << rep.total_violations() << " violations";
  report(1, rep.total_violations() == 0, os.str());
}

// --- criterion 2: hydrostatic exactness -----------------------------------

void criterion_hydrostatic() {
  Mesh m = build_mesh(kDomain, 1.0, 16, 8);
  MixedSpace sp = build_space(m);
  const double c = 2.5;
  double worst_u = 0.0, worst_p = 0.0;
  bool ok = true;
  auto D = FlowLaw::Darcy, F = FlowLaw::DarcyForchheimer;
  for (auto laws : {std::array<FlowLaw, 3>{D, D, D}, {F, F, F}, {D, F, F}, {F, D, F}}) {
    ProblemData d;
    d.xi = 0.75;
    d.law1 = laws[0];
    d.law2 = laws[1];
    d.law_gamma = laws[2];
    d.beta1 = d.beta2 = ScalarField::constant(1.0);
    d.beta_gamma = ScalarField::constant(1.0);
    d.p_d1.assign(m.edges.size(), c);
    d.p_d2.assign(m.edges.size(), c);
    d.p_d_gamma = {c, c};
    auto [s, rep] = solve_picard(sp, d, SolverOptions{});
    ok = ok && rep.converged;
    worst_u = std::max(worst_u, s.u.cwiseAbs().maxCoeff());
    worst_p = std::max(worst_p, (s.p.array() - c).abs().maxCoeff());
  }
  ok = ok && worst_u <= 1e-12 * std::abs(c) && worst_p <= 1e-12 * std::abs(c);
  std::ostringstream os;
  os << "hydrostatic exactness, max |u| = " << worst_u << ", max |p - c| = " << worst_p;
  report(2, ok, os.str());
}

// --- criterion 3: uniform-flow oracle -------------------------------------

double fracture_mean_flux(const Mesh& m, const MixedSpace& sp, const DiscreteState& s) {
  double sum = 0.0, len = 0.0;
  for (int e : m.fracture_segments) {
    sum += s.u[sp.edge_dof_side1[e]];
    len += m.edges[e].length;
  }
  return sum / len;
}

void criterion_uniform_flow() {
  Mesh m = build_mesh(kDomain, 1.0, 16, 8);
  MixedSpace sp = build_space(m);
  UniformFlowParams p;
  p.kappa = 0.5;
  p.xi = 0.75;
  p.w1 = p.w2 = 1.0;
  p.delta_p = 3.0;
  p.p_left = 2.0;

  UniformFlowSolution darcy = uniform_flow_oracle(p);
  ProblemData dd = build_uniform_flow_data(m, darcy, FlowLaw::Darcy, 1.0, 1.0,
                                           FlowLaw::DarcyForchheimer);
  auto [sd, rd] = solve_picard(sp, dd, SolverOptions{});
  double err_d = std::abs(fracture_mean_flux(m, sp, sd) - darcy.U);

  p.beta1 = p.beta2 = 1.0;
  UniformFlowSolution forch = uniform_flow_oracle(p);
  ProblemData df = build_uniform_flow_data(m, forch, FlowLaw::DarcyForchheimer, 1.0, 1.0,
                                           FlowLaw::DarcyForchheimer);
  SolverOptions opt;
  opt.tol_rel = 1e-12;
  opt.max_iter = 30;
  auto [sf, rf] = solve_picard(sp, df, opt);
  double err_f = std::abs(fracture_mean_flux(m, sp, sf) - forch.U);

  bool ok = rd.converged && rf.converged && err_d <= 1e-10 && err_f <= 1e-8;
  std::ostringstream os;
  os << "uniform flow vs 1D oracle, |U err| = " << err_d << " (linear), " << err_f
     << " (quadratic, " << rf.iterations << " iterations)";
  report(3, ok, os.str());
}

// --- criterion 4: uniqueness and monotonicity ------------------------------

void criterion_uniqueness() {
  Mesh m = build_mesh(kDomain, 1.0, 8, 4);
  MixedSpace sp = build_space(m);
  UniformFlowParams p;
  p.kappa = 0.5;
  p.xi = 0.75;
  p.w1 = p.w2 = 1.0;
  p.delta_p = 3.0;
  p.beta1 = p.beta2 = 1.0;
  ProblemData d = build_uniform_flow_data(m, uniform_flow_oracle(p),
                                          FlowLaw::DarcyForchheimer, 1.0, 1.0,
                                          FlowLaw::DarcyForchheimer);

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  std::vector<DiscreteState> limits;
  bool converged = true;
  for (int trial = 0; trial < 5; ++trial) {
    DiscreteState init = DiscreteState::zero(sp);
    for (int i = 0; i < sp.n_flux; ++i) init.u[i] = uni(rng);
    for (int i = 0; i < sp.n_pressure; ++i) init.p[i] = uni(rng);
    SolverOptions opt;
    opt.initial_state = InitialState::Given;
    auto [s, rep] = solve_picard(sp, d, opt, &init);
    converged = converged && rep.converged;
    limits.push_back(s);
  }
  double ref = limits[0].u.norm() + limits[0].p.norm();
  double spread = 0.0;
  for (size_t i = 0; i < limits.size(); ++i)
    for (size_t j = i + 1; j < limits.size(); ++j)
      spread = std::max(spread, (limits[i].u - limits[j].u).norm() +
                                    (limits[i].p - limits[j].p).norm());
  bool unique_ok = converged && spread <= 1e-9 * ref;

  SaddleSystem sys = assemble_linear(sp, d);
  int positive = 0;
  const int pairs = 1000;
  for (int trial = 0; trial < pairs; ++trial) {
    Vector u(sp.n_flux), w(sp.n_flux);
    for (int i = 0; i < sp.n_flux; ++i) {
      u[i] = uni(rng);
      w[i] = uni(rng);
    }
    if (monotonicity_pairing(sp, d, sys, u, w) > 1e-12 * (u - w).squaredNorm()) ++positive;
  }
  bool mono_ok = positive == pairs;

  std::ostringstream os;
  os << "uniqueness (5 starts, relative spread = " << spread / ref << ") and monotonicity ("
     << positive << "/" << pairs << " pairs strictly positive)";
  report(4, unique_ok && mono_ok, os.str());
}

// --- criterion 5: beta -> 0 sweeps ----------------------------------------

bool sweep_checks(const SweepResult& res, std::ostringstream& os) {
  if (!res.complete) {
    os << " [incomplete: " << res.message << "]";
    return false;
  }
  bool ok = true;
  for (size_t i = 1; i < res.rows.size(); ++i) {
    ok = ok && res.rows[i].dist_target < res.rows[i - 1].dist_target;
    ok = ok && res.rows[i].b12_u03 < res.rows[i - 1].b12_u03;
  }
  double first = res.rows.front().dist_target, last = res.rows.back().dist_target;
  ok = ok && last <= 1e-5 * first;
  for (const auto& r : res.rows) ok = ok && r.mass_residual <= 1e-10;
  os << " dist " << first << " -> " << last;
  return ok;
}

void criterion_beta_sweep() {
  std::vector<double> betas{1e0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::ostringstream os;
  os << "beta sweeps:";

  Mesh mf = build_mesh(kDomain, 1.0, 8, 4);
  MixedSpace spf = build_space(mf);
  auto data_frac = [&](double beta) {
    UniformFlowParams p;
    p.kappa = 0.5;
    p.xi = 0.75;
    p.w1 = p.w2 = 1.0;
    p.delta_p = 3.0;
    p.beta1 = p.beta2 = beta;
    FlowLaw law = beta > 0 ? FlowLaw::DarcyForchheimer : FlowLaw::Darcy;
    return build_uniform_flow_data(mf, uniform_flow_oracle(p), law, 1.0, 1.0,
                                   FlowLaw::DarcyForchheimer);
  };
  os << " fractured";
  bool ok = sweep_checks(beta_sweep(spf, betas, SweepScenario::Fractured, data_frac), os);

  Mesh ms = build_mesh_plain(kDomain, 8, 4);
  MixedSpace sps = build_space_single(ms);
  auto data_single = [&](double beta) {
    UniformFlowParams p;
    p.kappa = 0.0;
    p.xi = 0.75;
    p.w1 = 2.0;
    p.w2 = 0.0;
    p.delta_p = 3.0;
    p.beta1 = p.beta2 = beta;
    FlowLaw law = beta > 0 ? FlowLaw::DarcyForchheimer : FlowLaw::Darcy;
    return build_uniform_flow_data(ms, uniform_flow_oracle(p), law, 1.0, 0.0, FlowLaw::Darcy);
  };
  os << ", single-domain";
  ok = sweep_checks(beta_sweep(sps, betas, SweepScenario::SingleDomain, data_single), os) && ok;

  report(5, ok, os.str());
}

// --- criterion 6: discrete inf-sup ----------------------------------------

void criterion_infsup() {
  std::vector<double> thetas;
  for (int nx : {2, 4, 8}) {
    Mesh m = build_mesh(kDomain, 1.0, nx, std::max(1, nx / 2));
    thetas.push_back(discrete_infsup(build_space(m)));
  }
  double lo = *std::min_element(thetas.begin(), thetas.end());
  double hi = *std::max_element(thetas.begin(), thetas.end());
  bool ok = lo > 0.0 && hi / lo <= 1.2;
  std::ostringstream os;
  os << "inf-sup surrogate theta_h = {" << thetas[0] << ", " << thetas[1] << ", " << thetas[2]
     << "}, ratio = " << (lo > 0 ? hi / lo : 0.0);
  report(6, ok, os.str());
}

// --- criterion 7: manufactured-solution convergence -----------------------

void criterion_mms() {
  // nx = 4 is preasymptotic for the flux error; start one level finer.
  Mesh base = build_mesh(kDomain, 1.0, 8, 4);
  std::ostringstream os;
  bool ok = true;
  for (bool forchheimer : {false, true}) {
    ManufacturedSolution ms = forchheimer ? make_mms_forchheimer(1.0) : make_mms_darcy();
    RateTable t = mms_convergence(base, ms, 4, SolverOptions{});
    ok = ok && t.monotone && t.slope_flux >= 0.9 && t.slope_pressure >= 0.9;
    os << (forchheimer ? " quadratic-law" : " linear-law") << " slopes (" << t.slope_flux
       << ", " << t.slope_pressure << ")";
  }
  report(7, ok, "mms convergence:" + os.str());
}

// --- criterion 8: deterministic CSV output --------------------------------

void criterion_determinism(const char* cli) {
  if (!cli) {
    report(8, false, "determinism: CLI binary path not supplied");
    return;
  }
  fs::path tmp = fs::temp_directory_path() /
                 ("fracflow-accept-" + std::to_string(std::random_device{}()));
  fs::create_directories(tmp);
  fs::path config = tmp / "run.ini";
  {
    std::ofstream os(config);
    os << "[mesh]\nnx = 8\nny = 4\n"
       << "[data]\nkappa = 0.5\nxi = 0.75\nbeta1 = 1.0\nbeta2 = 1.0\n"
       << "[scenario]\ntype = uniform-flow\ndelta_p = 3.0\np_left = 2.0\n";
  }
  bool ok = true;
  std::string first_report, first_solve;
  for (int run = 0; run < 2; ++run) {
    fs::path out = tmp / ("run" + std::to_string(run));
    std::string cmd = std::string("\"") + cli + "\" \"" + config.string() + "\" -o \"" +
                      out.string() + "\" > /dev/null";
    ok = ok && std::system(cmd.c_str()) == 0;
    if (run == 0) {
      first_report = slurp(out / "report.csv");
      first_solve = slurp(out / "solve.csv");
    } else {
      ok = ok && !first_report.empty() && first_report == slurp(out / "report.csv");
      ok = ok && !first_solve.empty() && first_solve == slurp(out / "solve.csv");
    }
  }
  fs::remove_all(tmp);
  report(8, ok, "byte-identical CSVs across two CLI runs");
}

}  // namespace

int main(int argc, char** argv) {
  criterion_inequalities();
  criterion_hydrostatic();
  criterion_uniform_flow();
  criterion_uniqueness();
  criterion_beta_sweep();
  criterion_infsup();
  criterion_mms();
  criterion_determinism(argc > 1 ? argv[1] : nullptr);
  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << " ("
            << 8 - g_failures << "/8)" << std::endl;
  return g_failures == 0 ? 0 : 1;
}
