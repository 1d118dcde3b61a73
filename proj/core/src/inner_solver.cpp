#include "dualscheme/inner_solver.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <random>
#include <unordered_map>
#include <vector>

namespace dualscheme {

const char* to_string(Certification c) {
  switch (c) {
    case Certification::Certified: return "certified";
    case Certification::BestEffort: return "best-effort";
    case Certification::Uncertified: return "uncertified";
  }
  return "?";
}

namespace {

constexpr int kMaxBranchDim = 8;
constexpr int kDepthBits = 31;
constexpr std::uint32_t kLattice = 1u << kDepthBits;
constexpr long long kPolishCap = 20000;
constexpr int kLineSearchBits = 26;

// Merit evaluations with a running count and incumbent.
class Objective {
 public:
  Objective(const ProblemSpec& problem, const MeritParam& mu) : problem_(problem), mu_(mu) {}

  double operator()(const Vec& x) {
    ++evaluations_;
    double v = merit_eval(problem_, x, mu_);
    if (std::isnan(v)) v = kInf;
    if (v < best_value_) {
      best_value_ = v;
      best_x_ = x;
    }
    return v;
  }

  long long evaluations() const { return evaluations_; }
  double best_value() const { return best_value_; }
  const Vec& best_x() const { return best_x_; }

 private:
  const ProblemSpec& problem_;
  const MeritParam& mu_;
  long long evaluations_ = 0;
  double best_value_ = kInf;
  Vec best_x_;
};

// Line search directions: coordinate axes, pairwise diagonals (d <= 4).
std::vector<Vec> search_directions(int d) {
  std::vector<Vec> dirs;
  for (int k = 0; k < d; ++k) dirs.push_back(Vec::Unit(d, k));
  if (d <= 4) {
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        Vec plus = Vec::Zero(d);
        plus[i] = plus[j] = std::sqrt(0.5);
        Vec minus = plus;
        minus[j] = -minus[j];
        dirs.push_back(plus);
        dirs.push_back(minus);
      }
    }
  }
  return dirs;
}

// Range of t with x + t dir inside the box, intersected with [t_lo, t_hi].
std::pair<double, double> feasible_range(const GroundSet& q, const Vec& x, const Vec& dir, double t_lo, double t_hi) {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (dir[k] > 0.0) {
      t_hi = std::min(t_hi, (q.upper()[k] - x[k]) / dir[k]);
      t_lo = std::max(t_lo, (q.lower()[k] - x[k]) / dir[k]);
    } else if (dir[k] < 0.0) {
      t_hi = std::min(t_hi, (q.lower()[k] - x[k]) / dir[k]);
      t_lo = std::max(t_lo, (q.upper()[k] - x[k]) / dir[k]);
    }
  }
  return {t_lo, t_hi};
}

class Polisher {
 public:
  Polisher(const GroundSet& ground, Objective& objective)
      : ground_(ground), objective_(objective), dirs_(search_directions(ground.dim())) {
    width_ = (ground.upper() - ground.lower()).maxCoeff();
  }

  // Projected line-search descent; returns the point reached and its value.
  std::pair<Vec, double> run(Vec x, double fx, long long max_evaluations) {
    const long long stop_at = objective_.evaluations() + max_evaluations;
    double step = 0.25 * std::max(width_, 1e-12);
    const double min_step = 1e-13 * std::max(1.0, width_);
    for (int sweep = 0; sweep < 400 && step > min_step && objective_.evaluations() < stop_at; ++sweep) {
      const Vec start = x;
      const double f_start = fx;
      double longest = 0.0;
      for (const Vec& dir : dirs_) {
        const double moved = line_search(x, fx, dir, -step, step);
        longest = std::max(longest, std::abs(moved));
        if (objective_.evaluations() >= stop_at) break;
      }
      const Vec pattern = x - start;
      if (pattern.norm() > 0.0 && objective_.evaluations() < stop_at) {
        line_search(x, fx, pattern, 0.0, 4.0);
      }
      if (!(fx < f_start)) {
        step *= 0.25;
      } else if (longest > 0.9 * step) {
        step = std::min(2.0 * step, width_);
      }
    }
    return {x, fx};
  }

 private:
  double line_search(Vec& x, double& fx, const Vec& dir, double t_lo, double t_hi) {
    const auto [lo, hi] = feasible_range(ground_, x, dir, t_lo, t_hi);
    if (!(hi > lo)) return 0.0;
    const Vec base = x;
    auto along = [&](double t) { return objective_(ground_.project(base + t * dir)); };
    boost::uintmax_t iterations = 100;
    const auto [t_best, v_best] =
        boost::math::tools::brent_find_minima(along, lo, hi, kLineSearchBits, iterations);
    if (v_best < fx) {
      x = ground_.project(base + t_best * dir);
      fx = v_best;
      return t_best;
    }
    return 0.0;
  }

  const GroundSet& ground_;
  Objective& objective_;
  std::vector<Vec> dirs_;
  double width_ = 0.0;
};

// ---------------------------------------------------------------------------
// Branch-and-bound over dyadic boxes of the ground set.

using LatticePoint = std::array<std::uint32_t, kMaxBranchDim>;

struct LatticeHash {
  std::size_t operator()(const LatticePoint& p) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint32_t c : p) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

struct BoxEntry {
  double lower_bound;
  std::uint64_t order;  // creation order, for deterministic tie-breaks
  std::size_t slot;
};

struct BoxEntryGreater {
  bool operator()(const BoxEntry& a, const BoxEntry& b) const {
    if (a.lower_bound != b.lower_bound) return a.lower_bound > b.lower_bound;
    return a.order > b.order;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const GroundSet& ground, Objective& objective, const MeritBounds& bounds)
      : ground_(ground), objective_(objective), bounds_(bounds), dim_(ground.dim()) {
    widths_ = ground.upper() - ground.lower();
    LatticePoint lo{};
    LatticePoint hi{};
    for (int k = 0; k < dim_; ++k) hi[static_cast<std::size_t>(k)] = kLattice;
    push_box(lo, hi);
  }

  double global_lower_bound() const {
    double lb = frozen_lower_bound_;
    if (!queue_.empty()) lb = std::min(lb, queue_.top().lower_bound);
    return lb;
  }

  bool exhausted() const { return queue_.empty(); }

  // Splits the box with the least lower bound.
  void step() {
    const BoxEntry top = queue_.top();
    queue_.pop();
    if (top.lower_bound >= objective_.best_value()) return;  // cannot contain anything better
    const LatticePoint lo = lows_[top.slot];
    const LatticePoint hi = highs_[top.slot];

    int split = -1;
    double widest = -1.0;
    for (int k = 0; k < dim_; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      if (hi[kk] - lo[kk] < 2) continue;
      const double w = widths_[k] * static_cast<double>(hi[kk] - lo[kk]);
      if (w > widest) {
        widest = w;
        split = k;
      }
    }
    if (split < 0) {
      frozen_lower_bound_ = std::min(frozen_lower_bound_, top.lower_bound);
      return;
    }
    const auto s = static_cast<std::size_t>(split);
    const std::uint32_t mid = lo[s] + (hi[s] - lo[s]) / 2;
    LatticePoint left_hi = hi;
    left_hi[s] = mid;
    LatticePoint right_lo = lo;
    right_lo[s] = mid;
    push_box(lo, left_hi);
    push_box(right_lo, hi);
  }

  std::size_t open_boxes() const { return queue_.size(); }

 private:
  Vec to_point(const LatticePoint& p) const {
    Vec x(dim_);
    for (int k = 0; k < dim_; ++k) {
      const auto c = p[static_cast<std::size_t>(k)];
      x[k] = c == kLattice ? ground_.upper()[k]
                           : ground_.lower()[k] + widths_[k] * std::ldexp(static_cast<double>(c), -kDepthBits);
    }
    return x;
  }

  double vertex_value(const LatticePoint& p) {
    const auto it = cache_.find(p);
    if (it != cache_.end()) return it->second;
    const double v = objective_(to_point(p));
    cache_.emplace(p, v);
    return v;
  }

  void push_box(const LatticePoint& lo, const LatticePoint& hi) {
    double vmin = kInf;
    bool bounded = true;
    const unsigned corners = 1u << static_cast<unsigned>(dim_);
    for (unsigned mask = 0; mask < corners; ++mask) {
      LatticePoint p{};
      for (int k = 0; k < dim_; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        p[kk] = (mask >> static_cast<unsigned>(k)) & 1u ? hi[kk] : lo[kk];
      }
      const double v = vertex_value(p);
      if (!std::isfinite(v)) bounded = false;
      vmin = std::min(vmin, v);
    }

    double slack = kInf;
    if (bounded) {
      double half_diag_sq = 0.0;
      double interp = 0.0;
      for (int k = 0; k < dim_; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double side = widths_[k] * std::ldexp(static_cast<double>(hi[kk] - lo[kk]), -kDepthBits);
        half_diag_sq += 0.25 * side * side;
        interp += side * side / 8.0;
      }
      if (bounds_.lipschitz) slack = std::min(slack, *bounds_.lipschitz * std::sqrt(half_diag_sq));
      if (bounds_.curvature) slack = std::min(slack, *bounds_.curvature * interp);
    }
    const double lb = std::isfinite(slack) ? vmin - slack : -kInf;

    lows_.push_back(lo);
    highs_.push_back(hi);
    queue_.push({lb, next_order_++, lows_.size() - 1});
  }

  const GroundSet& ground_;
  Objective& objective_;
  MeritBounds bounds_;
  int dim_;
  Vec widths_;
  std::vector<LatticePoint> lows_;
  std::vector<LatticePoint> highs_;
  std::priority_queue<BoxEntry, std::vector<BoxEntry>, BoxEntryGreater> queue_;
  std::unordered_map<LatticePoint, double, LatticeHash> cache_;
  double frozen_lower_bound_ = kInf;
  std::uint64_t next_order_ = 0;
};

// Uniform grids of 2, 4, 8, ... intervals per side while they fit in the allowance.
void coarse_to_fine_grid(const GroundSet& ground, Objective& objective, long long allowance) {
  const int d = ground.dim();
  long long spent = 0;
  for (long long n = 2;; n *= 2) {
    const double points = std::pow(static_cast<double>(n + 1), d);
    if (spent + points > static_cast<double>(allowance)) break;
    std::vector<long long> idx(static_cast<std::size_t>(d), 0);
    Vec x(d);
    while (true) {
      for (int k = 0; k < d; ++k) {
        x[k] = ground.lower()[k] + (ground.upper()[k] - ground.lower()[k]) *
                                       static_cast<double>(idx[static_cast<std::size_t>(k)]) / static_cast<double>(n);
      }
      objective(x);
      int k = d - 1;
      while (k >= 0 && idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k--)] = 0;
      if (k < 0) break;
      ++idx[static_cast<std::size_t>(k)];
    }
    spent += static_cast<long long>(points);
  }
}

}  // namespace

SolveResult solve_subproblem(const SolveRequest& request) {
  const ProblemSpec& problem = request.problem;
  const SolverOptions& opts = request.options;
  if (!(request.epsilon >= 0.0)) throw InputError("inner solver: epsilon must be nonnegative");
  if (opts.budget <= 0) throw InputError("inner solver: budget must be positive");
  validate_merit_param(problem, request.mu);

  const GroundSet& ground = problem.ground;
  Objective objective(problem, request.mu);
  Polisher polisher(ground, objective);
  const long long polish_cap = std::min(kPolishCap, std::max<long long>(opts.budget / 10, 200));
  auto polish = [&](const Vec& x, double fx) {
    const long long allowed = std::min(polish_cap, opts.budget - objective.evaluations());
    if (allowed > 0) polisher.run(x, fx, allowed);
  };

  std::vector<Vec> starts;
  if (request.warm_start) {
    require_dimension(*request.warm_start, problem.dimension, "warm start");
    starts.push_back(ground.project(*request.warm_start));
  }
  starts.push_back(ground.center());
  std::mt19937_64 rng(request.seed);
  for (int i = 0; i < opts.multistart; ++i) {
    Vec x(problem.dimension);
    for (int k = 0; k < problem.dimension; ++k) {
      std::uniform_real_distribution<double> coord(ground.lower()[k], ground.upper()[k]);
      x[k] = coord(rng);
    }
    starts.push_back(x);
  }
  for (const Vec& s : starts) {
    const double fs = objective(s);
    if (std::isfinite(fs)) polish(s, fs);
  }

  const MeritBounds bounds = merit_bounds(problem, request.mu);
  const bool can_branch = (bounds.lipschitz || bounds.curvature) && problem.dimension <= kMaxBranchDim;

  double gap = kInf;
  std::string diagnostic;
  if (!can_branch) {
    coarse_to_fine_grid(ground, objective, opts.budget / 2);
    if (std::isfinite(objective.best_value())) {
      polish(objective.best_x(), objective.best_value());
    }
    diagnostic = "no derivative bound for this merit; result not certified";
  } else {
    BranchAndBound bnb(ground, objective, bounds);
    double rung = kInf;
    while (true) {
      const double incumbent = objective.best_value();
      gap = std::max(0.0, incumbent - bnb.global_lower_bound());
      if (std::isfinite(incumbent) && gap <= rung) {
        // Polish the incumbent each time the gap shrinks fourfold.
        polish(objective.best_x(), incumbent);
        gap = std::max(0.0, objective.best_value() - bnb.global_lower_bound());
        rung = 0.25 * gap;
      }
      const double floor = opts.relative_gap_floor * std::max(1.0, std::abs(objective.best_value()));
      if (gap <= std::max(request.epsilon, floor)) break;
      if (bnb.exhausted()) {
        diagnostic = "subdivision depth limit reached before the gap reached epsilon";
        break;
      }
      if (objective.evaluations() >= opts.budget) {
        diagnostic = "evaluation budget exhausted before the gap reached epsilon";
        break;
      }
      bnb.step();
    }
    if (diagnostic.empty() && gap > request.epsilon) diagnostic = "gap floor reached before epsilon";
  }

  if (!std::isfinite(objective.best_value())) {
    throw InputError(problem.name + ": merit function is +inf at every sampled point");
  }

  SolveResult result{objective.best_x(), objective.best_value(), gap, objective.evaluations(),
                     Certification::Certified, diagnostic};
  if (!std::isfinite(gap)) {
    result.status = Certification::Uncertified;
  } else if (gap > request.epsilon) {
    result.status = Certification::BestEffort;
  }
  if (opts.require_certificate && result.status != Certification::Certified) {
    throw BudgetError(problem.name + ": " + (diagnostic.empty() ? std::string("not certified") : diagnostic),
                      result.x, result.merit_value, result.certified_gap);
  }
  return result;
}

DualBracket dual_bracket(const SolveRequest& request, const SolveResult& result) {
  if (!std::isfinite(result.certified_gap)) return {-kInf, result.merit_value, false};
  return {result.merit_value - std::max(request.epsilon, result.certified_gap), result.merit_value, true};
}

}  // namespace dualscheme
