#ifndef FRACFLOW_PROBLEM_DATA_HPP
#define FRACFLOW_PROBLEM_DATA_HPP

#include <cmath>
#include <string>
#include <vector>

#include "fracflow/mesh.hpp"

namespace fracflow {

enum class FlowLaw { Darcy, DarcyForchheimer };

/// Symmetric 2x2 tensor coefficient, either constant or per triangle.
/// Invariants: symmetry is structural (only xx, xy, yy stored); both
/// eigenvalues must stay >= a declared positive lower bound.
struct TensorField {
  struct Tensor {
    double xx = 1.0, xy = 0.0, yy = 1.0;
    Vec2 apply(const Vec2& v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
    double min_eigenvalue() const {
      double tr = xx + yy;
      double det = xx * yy - xy * xy;
      double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
      return tr / 2.0 - disc;
    }
  };

  std::vector<Tensor> values;  // size 1 (constant) or one per entity
  double lower_bound = 0.0;    // declared minimum eigenvalue, > 0

  static TensorField constant(double a, double lower = -1.0) {
    TensorField f;
    f.values.push_back(Tensor{a, 0.0, a});
    f.lower_bound = lower > 0 ? lower : a;
    return f;
  }
  static TensorField constant_tensor(double xx, double xy, double yy, double lower) {
    TensorField f;
    f.values.push_back(Tensor{xx, xy, yy});
    f.lower_bound = lower;
    return f;
  }

  bool is_constant() const { return values.size() == 1; }
  const Tensor& at(int entity) const { return is_constant() ? values[0] : values[entity]; }
};

/// Nonnegative scalar coefficient on cells of a subdomain or segments of
/// the fracture; constant or per entity, with declared bounds.
struct ScalarField {
  std::vector<double> values;  // size 1 (constant) or one per entity
  double lower_bound = 0.0;
  double upper_bound = std::numeric_limits<double>::infinity();
  bool strictly_positive = false;  // whether lower_bound must be > 0

  static ScalarField constant(double v, bool strict = false) {
    ScalarField f;
    f.values.push_back(v);
    f.lower_bound = v;
    f.upper_bound = v;
    f.strictly_positive = strict;
    return f;
  }

  bool is_constant() const { return values.size() == 1; }
  double at(int entity) const { return is_constant() ? values[0] : values[entity]; }
};

/// All coefficients and data of the mixed-dimensional model. Immutable
/// after validation; xi_bar = 1 - xi is always derived, never stored.
struct ProblemData {
  TensorField alpha1 = TensorField::constant(1.0);
  TensorField alpha2 = TensorField::constant(1.0);
  ScalarField alpha_gamma = ScalarField::constant(1.0, true);
  ScalarField beta1 = ScalarField::constant(0.0);
  ScalarField beta2 = ScalarField::constant(0.0);
  ScalarField beta_gamma = ScalarField::constant(0.0);
  ScalarField kappa = ScalarField::constant(1.0, true);
  double xi = 1.0;

  FlowLaw law1 = FlowLaw::Darcy;
  FlowLaw law2 = FlowLaw::Darcy;
  FlowLaw law_gamma = FlowLaw::DarcyForchheimer;

  // Per-entity data use global mesh indices (triangle index, edge index,
  // fracture segment position); size 1 means a constant.
  std::vector<double> q1, q2;      // sources on Omega_1 / Omega_2, per triangle
  std::vector<double> q_gamma;     // source on gamma, per segment
  std::vector<double> p_d1, p_d2;  // Dirichlet pressure on Gamma_1 / Gamma_2, per edge
  std::array<double, 2> p_d_gamma{0.0, 0.0};  // at the bottom / top of gamma

  double xi_bar() const { return 1.0 - xi; }

  double q_cell(int subdomain, int cell) const {
    const auto& q = subdomain == 1 ? q1 : q2;
    if (q.empty()) return 0.0;
    return q.size() == 1 ? q[0] : q[cell];
  }
  double q_segment(int seg) const {
    if (q_gamma.empty()) return 0.0;
    return q_gamma.size() == 1 ? q_gamma[0] : q_gamma[seg];
  }
  double dirichlet(int subdomain, int edge) const {
    const auto& pd = subdomain == 1 ? p_d1 : p_d2;
    if (pd.empty()) return 0.0;
    return pd.size() == 1 ? pd[0] : pd[edge];
  }

  double beta_of(int subdomain, int cell) const {
    const auto& law = subdomain == 1 ? law1 : law2;
    if (law == FlowLaw::Darcy) return 0.0;
    return (subdomain == 1 ? beta1 : beta2).at(cell);
  }
};

struct Violation {
  std::string field;
  int entity = -1;  // -1: global
  std::string message;
};

namespace detail {

inline void check_sizes(const std::vector<double>& v, size_t n, const char* name,
                        std::vector<std::string>& structural) {
  if (!v.empty() && v.size() != 1 && v.size() != n)
    structural.push_back(std::string(name) + ": expected size 1 or " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
}

inline void check_tensor(const TensorField& f, size_t n, const char* name,
                         std::vector<Violation>& out, std::vector<std::string>& structural) {
  if (f.values.size() != 1 && f.values.size() != n) {
    structural.push_back(std::string(name) + ": expected 1 or " + std::to_string(n) +
                         " tensors, got " + std::to_string(f.values.size()));
    return;
  }
  if (!(f.lower_bound > 0))
    out.push_back({name, -1, "declared eigenvalue lower bound must be > 0"});
  for (size_t i = 0; i < f.values.size(); ++i) {
    double lam = f.values[i].min_eigenvalue();
    if (!(lam >= f.lower_bound - 1e-14 * std::abs(f.lower_bound)) || !(lam > 0))
      out.push_back({name, static_cast<int>(i),
                     "not uniformly positive definite: min eigenvalue " + std::to_string(lam) +
                         " below bound " + std::to_string(f.lower_bound)});
  }
}

inline void check_scalar(const ScalarField& f, size_t n, const char* name,
                         std::vector<Violation>& out, std::vector<std::string>& structural) {
  if (f.values.size() != 1 && f.values.size() != n) {
    structural.push_back(std::string(name) + ": expected 1 or " + std::to_string(n) +
                         " values, got " + std::to_string(f.values.size()));
    return;
  }
  if (f.strictly_positive && !(f.lower_bound > 0))
    out.push_back({name, -1, "declared lower bound must be > 0"});
  for (size_t i = 0; i < f.values.size(); ++i) {
    double v = f.values[i];
    if (v < 0) out.push_back({name, static_cast<int>(i), "negative value"});
    if (v < f.lower_bound || v > f.upper_bound)
      out.push_back({name, static_cast<int>(i), "value " + std::to_string(v) +
                                                    " outside declared bounds"});
    if (f.strictly_positive && !(v > 0))
      out.push_back({name, static_cast<int>(i), "value must be strictly positive"});
  }
}

}  // namespace detail

struct StructuralError : std::runtime_error {
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

/// Checks every coefficient hypothesis against the mesh. Returns the
/// (possibly empty) list of bound violations; throws StructuralError on
/// size mismatches, which are bugs rather than data issues.
inline std::vector<Violation> validate(const ProblemData& data, const Mesh& mesh) {
  std::vector<Violation> out;
  std::vector<std::string> structural;

  size_t nt = mesh.triangles.size();
  size_t ne = mesh.edges.size();
  size_t ns = mesh.fracture_segments.size();

  detail::check_tensor(data.alpha1, nt, "alpha1", out, structural);
  detail::check_tensor(data.alpha2, nt, "alpha2", out, structural);
  detail::check_scalar(data.alpha_gamma, ns, "alpha_gamma", out, structural);
  detail::check_scalar(data.beta1, nt, "beta1", out, structural);
  detail::check_scalar(data.beta2, nt, "beta2", out, structural);
  detail::check_scalar(data.beta_gamma, ns, "beta_gamma", out, structural);
  detail::check_scalar(data.kappa, ns, "kappa", out, structural);
  detail::check_sizes(data.q1, nt, "q1", structural);
  detail::check_sizes(data.q2, nt, "q2", structural);
  detail::check_sizes(data.q_gamma, ns, "q_gamma", structural);
  detail::check_sizes(data.p_d1, ne, "p_d1", structural);
  detail::check_sizes(data.p_d2, ne, "p_d2", structural);

  if (!structural.empty()) {
    std::string msg = "problem data / mesh size mismatch:";
    for (const auto& s : structural) msg += "\n  " + s;
    throw StructuralError(msg);
  }

  if (!(data.xi > 0.5))
    out.push_back({"xi", -1, "xi must be greater than 1/2, got " + std::to_string(data.xi)});

  if (mesh.has_fracture() && data.law_gamma == FlowLaw::DarcyForchheimer) {
    for (size_t i = 0; i < data.beta_gamma.values.size(); ++i)
      if (!(data.beta_gamma.values[i] > 0))
        out.push_back({"beta_gamma", static_cast<int>(i),
                       "Forchheimer law on gamma requires beta_gamma > 0"});
  }
  return out;
}

}  // namespace fracflow

#endif  // FRACFLOW_PROBLEM_DATA_HPP
