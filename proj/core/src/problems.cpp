#include "dualscheme/problems.hpp"

#include <cmath>

namespace dualscheme {

GroundSet::GroundSet(Vec lower, Vec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0) throw InputError("ground set: empty box");
  require_dimension(upper_, lower_.size(), "ground set upper bound");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || lower_[i] > upper_[i]) {
      throw InputError("ground set: need finite lower[i] <= upper[i] at coordinate " + std::to_string(i + 1));
    }
  }
}

bool GroundSet::contains(const Vec& x) const {
  require_dimension(x, lower_.size(), "ground set membership");
  return (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
}

Vec GroundSet::project(const Vec& x) const {
  require_dimension(x, lower_.size(), "ground set projection");
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

int ProblemSpec::constraint_layout_dim() const {
  if (constraints.has_scalar_form()) return equality_count() + inequality_count();
  if (constraints.cone_map) return constraints.cone_map->cone.dim();
  return 0;
}

void validate_problem(const ProblemSpec& problem) {
  if (problem.dimension <= 0) throw InputError(problem.name + ": dimension must be positive");
  if (problem.ground.dim() != problem.dimension) {
    throw InputError(problem.name + ": ground set dimension does not match problem dimension");
  }
  if (!problem.objective) throw InputError(problem.name + ": missing objective");
  if (!problem.constraints.has_scalar_form() && !problem.constraints.has_cone_form()) {
    throw InputError(problem.name + ": no constraints");
  }
  if (problem.constraints.cone_map) {
    const Vec g = problem.constraints.cone_map->map(problem.ground.center());
    if (g.size() != problem.constraints.cone_map->cone.dim()) {
      throw InputError(problem.name + ": cone map dimension " + std::to_string(g.size()) +
                       " does not match cone dimension " +
                       std::to_string(problem.constraints.cone_map->cone.dim()));
    }
  }
  if (problem.certified) {
    const Certificate& cert = *problem.certified;
    require_dimension(cert.x_star, problem.dimension, "certified optimum");
    const double infeas = infeasibility(problem, cert.x_star);
    const double value = problem.objective(cert.x_star);
    if (infeas > cert.tolerance || std::abs(value - cert.f_star) > cert.tolerance) {
      throw InputError(problem.name + ": certified optimum is not feasible or f(x_star) != f_star");
    }
  }
}

ConstraintValues evaluate_constraints(const ProblemSpec& problem, const Vec& x) {
  require_dimension(x, problem.dimension, "evaluate_constraints");
  const ConstraintBlock& block = problem.constraints;
  ConstraintValues out;
  out.h.resize(static_cast<Eigen::Index>(block.equalities.size()));
  for (std::size_t i = 0; i < block.equalities.size(); ++i) out.h[static_cast<Eigen::Index>(i)] = block.equalities[i](x);
  out.g.resize(static_cast<Eigen::Index>(block.inequalities.size()));
  for (std::size_t j = 0; j < block.inequalities.size(); ++j) out.g[static_cast<Eigen::Index>(j)] = block.inequalities[j](x);
  if (block.cone_map) out.G = block.cone_map->map(x);
  return out;
}

double infeasibility_l1(const ProblemSpec& problem, const Vec& x) {
  require_dimension(x, problem.dimension, "infeasibility_l1");
  double total = 0.0;
  for (const ScalarFunction& h : problem.constraints.equalities) total += std::abs(h(x));
  for (const ScalarFunction& g : problem.constraints.inequalities) total += std::max(0.0, g(x));
  return total;
}

double infeasibility_cone(const ProblemSpec& problem, const Vec& x) {
  require_dimension(x, problem.dimension, "infeasibility_cone");
  if (!problem.constraints.cone_map) throw ConfigurationError(problem.name + ": no cone constraint");
  const ConeMap& cm = *problem.constraints.cone_map;
  return distance(cm.cone, cm.map(x));
}

double infeasibility(const ProblemSpec& problem, const Vec& x) {
  return problem.constraints.has_scalar_form() ? infeasibility_l1(problem, x) : infeasibility_cone(problem, x);
}

namespace {

struct GridBest {
  double value = kInf;
  Vec x;
  long long points = 0;
};

// Lexicographic scan of the uniform grid with spacing <= resolution.
template <typename Infeasibility>
GridBest scan_grid(const ProblemSpec& problem, double resolution, double slack, Infeasibility&& infeas) {
  if (!(resolution > 0.0)) throw InputError("grid oracle: resolution must be positive");
  const GroundSet& q = problem.ground;
  const int d = problem.dimension;
  std::vector<long long> count(static_cast<std::size_t>(d));
  double total = 1.0;
  for (int k = 0; k < d; ++k) {
    const double width = q.upper()[k] - q.lower()[k];
    count[static_cast<std::size_t>(k)] = width > 0.0 ? static_cast<long long>(std::ceil(width / resolution - 1e-9)) : 0;
    total *= static_cast<double>(count[static_cast<std::size_t>(k)] + 1);
  }
  if (total > 4e9) throw InputError("grid oracle: resolution too fine for the box (" + std::to_string(total) + " points)");

  auto coordinate = [&](int k, long long i) {
    const long long n = count[static_cast<std::size_t>(k)];
    if (n == 0 || i == n) return n == 0 ? q.lower()[k] : q.upper()[k];
    return q.lower()[k] + (q.upper()[k] - q.lower()[k]) * static_cast<double>(i) / static_cast<double>(n);
  };

  GridBest best;
  std::vector<long long> index(static_cast<std::size_t>(d), 0);
  Vec x(d);
  for (int k = 0; k < d; ++k) x[k] = coordinate(k, 0);
  while (true) {
    ++best.points;
    if (infeas(x) <= slack) {
      const double v = problem.objective(x);
      if (v < best.value) {
        best.value = v;
        best.x = x;
      }
    }
    int k = d - 1;
    while (k >= 0) {
      auto& i = index[static_cast<std::size_t>(k)];
      if (i < count[static_cast<std::size_t>(k)]) {
        ++i;
        x[k] = coordinate(k, i);
        break;
      }
      i = 0;
      x[k] = coordinate(k, 0);
      --k;
    }
    if (k < 0) break;
  }
  return best;
}

double lipschitz_allowance(const ProblemSpec& problem, double resolution) {
  if (!problem.bounds || !std::isfinite(problem.bounds->objective_lipschitz)) return kInf;
  return problem.bounds->objective_lipschitz * resolution * std::sqrt(static_cast<double>(problem.dimension));
}

}  // namespace

OracleResult brute_force_optimum(const ProblemSpec& problem, double resolution, double feasibility_slack) {
  GridBest best = scan_grid(problem, resolution, feasibility_slack,
                            [&](const Vec& x) { return infeasibility(problem, x); });
  if (!std::isfinite(best.value)) {
    throw InfeasibleAtResolution(problem.name + ": no grid point within feasibility slack at resolution " +
                                 std::to_string(resolution));
  }
  const double allowance = lipschitz_allowance(problem, resolution);
  return {best.value - allowance, best.value, std::isfinite(allowance), std::move(best.x), best.points};
}

PerturbationEstimate perturbation_estimate(const ProblemSpec& problem, const PerturbationQuery& query,
                                           double feasibility_slack) {
  require_dimension(query.y, problem.constraint_layout_dim(), "perturbation vector");
  const ConstraintBlock& block = problem.constraints;
  const Vec& y = query.y;
  GridBest best;
  if (block.has_scalar_form()) {
    const auto m = static_cast<Eigen::Index>(block.equalities.size());
    best = scan_grid(problem, query.resolution, feasibility_slack, [&](const Vec& x) {
      double total = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) total += std::abs(block.equalities[static_cast<std::size_t>(i)](x) - y[i]);
      for (std::size_t j = 0; j < block.inequalities.size(); ++j) {
        total += std::max(0.0, block.inequalities[j](x) - y[m + static_cast<Eigen::Index>(j)]);
      }
      return total;
    });
  } else {
    const ConeMap& cm = *block.cone_map;
    best = scan_grid(problem, query.resolution, feasibility_slack,
                     [&](const Vec& x) { return distance(cm.cone, cm.map(x) - y); });
  }
  if (!std::isfinite(best.value)) {
    throw InfeasibleAtResolution(problem.name + ": shifted problem has no grid-feasible point");
  }
  const double allowance = lipschitz_allowance(problem, query.resolution);
  return {best.value, best.value - allowance, std::isfinite(allowance), std::move(best.x)};
}

}  // namespace dualscheme
