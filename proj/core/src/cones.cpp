#include "dualscheme/cones.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace dualscheme {
namespace {

int min_dim(ConeKind kind) {
  return kind == ConeKind::SecondOrder || kind == ConeKind::NegativeSecondOrder ? 2 : 1;
}

ConeKind polar_kind(ConeKind kind) {
  switch (kind) {
    case ConeKind::Zero: return ConeKind::Free;
    case ConeKind::Free: return ConeKind::Zero;
    case ConeKind::NonpositiveOrthant: return ConeKind::NonnegativeOrthant;
    case ConeKind::NonnegativeOrthant: return ConeKind::NonpositiveOrthant;
    case ConeKind::SecondOrder: return ConeKind::NegativeSecondOrder;
    case ConeKind::NegativeSecondOrder: return ConeKind::SecondOrder;
  }
  return kind;
}

const char* kind_name(ConeKind kind) {
  switch (kind) {
    case ConeKind::Zero: return "zero";
    case ConeKind::Free: return "free";
    case ConeKind::NonpositiveOrthant: return "orthant-";
    case ConeKind::NonnegativeOrthant: return "orthant+";
    case ConeKind::SecondOrder: return "soc";
    case ConeKind::NegativeSecondOrder: return "-soc";
  }
  return "?";
}

// Three-branch closed form; the |x| = 0 tie falls to the first branch when
// t >= 0 and to the second when t < 0.
void project_soc(Eigen::Ref<Vec> y) {
  const Eigen::Index n = y.size() - 1;
  const double t = y[n];
  const double norm_x = y.head(n).norm();
  if (norm_x <= t) return;
  if (norm_x <= -t) {
    y.setZero();
    return;
  }
  const double scale = 0.5 * (norm_x + t);
  y.head(n) *= scale / norm_x;
  y[n] = scale;
}

void project_factor(ConeKind kind, Eigen::Ref<Vec> y) {
  switch (kind) {
    case ConeKind::Zero: y.setZero(); return;
    case ConeKind::Free: return;
    case ConeKind::NonpositiveOrthant: y = y.cwiseMin(0.0); return;
    case ConeKind::NonnegativeOrthant: y = y.cwiseMax(0.0); return;
    case ConeKind::SecondOrder: project_soc(y); return;
    case ConeKind::NegativeSecondOrder:
      // Pi_{-K}(y) = -Pi_K(-y)
      y = -y;
      project_soc(y);
      y = -y;
      return;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Cone::Cone(std::vector<Factor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw InputError("cone: at least one factor is required");
  for (const Factor& f : factors_) {
    if (f.dim < min_dim(f.kind)) {
      throw InputError(std::string("cone: factor '") + kind_name(f.kind) + "' needs dimension >= " +
                       std::to_string(min_dim(f.kind)));
    }
    dim_ += f.dim;
  }
}

Cone Cone::zero(int dim) { return Cone({{ConeKind::Zero, dim}}); }
Cone Cone::free(int dim) { return Cone({{ConeKind::Free, dim}}); }
Cone Cone::nonpositive_orthant(int dim) { return Cone({{ConeKind::NonpositiveOrthant, dim}}); }
Cone Cone::nonnegative_orthant(int dim) { return Cone({{ConeKind::NonnegativeOrthant, dim}}); }
Cone Cone::second_order(int dim) { return Cone({{ConeKind::SecondOrder, dim}}); }
Cone Cone::negative_second_order(int dim) { return Cone({{ConeKind::NegativeSecondOrder, dim}}); }

Cone Cone::product(const std::vector<Cone>& factors) {
  std::vector<Factor> flat;
  for (const Cone& c : factors) flat.insert(flat.end(), c.factors_.begin(), c.factors_.end());
  return Cone(std::move(flat));
}

Cone Cone::parse(std::string_view text) {
  std::vector<Factor> factors;
  std::string_view rest = text;
  while (true) {
    const std::size_t sep = rest.find(" x ");
    std::string_view token = trim(rest.substr(0, sep));
    const std::size_t colon = token.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigurationError("cone: expected 'name:dim' in '" + std::string(token) + "'");
    }
    const std::string_view name = trim(token.substr(0, colon));
    const std::string_view dim_text = trim(token.substr(colon + 1));
    int dim = 0;
    auto [ptr, ec] = std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), dim);
    if (ec != std::errc() || ptr != dim_text.data() + dim_text.size() || dim <= 0) {
      throw ConfigurationError("cone: bad dimension in '" + std::string(token) + "'");
    }
    ConeKind kind;
    if (name == "zero") kind = ConeKind::Zero;
    else if (name == "free") kind = ConeKind::Free;
    else if (name == "orthant-") kind = ConeKind::NonpositiveOrthant;
    else if (name == "orthant+") kind = ConeKind::NonnegativeOrthant;
    else if (name == "soc") kind = ConeKind::SecondOrder;
    else if (name == "-soc") kind = ConeKind::NegativeSecondOrder;
    else throw ConfigurationError("cone: unknown cone identifier '" + std::string(name) + "'");
    factors.push_back({kind, dim});
    if (sep == std::string_view::npos) break;
    rest = rest.substr(sep + 3);
  }
  try {
    return Cone(std::move(factors));
  } catch (const InputError& e) {
    throw ConfigurationError(e.what());
  }
}

std::string Cone::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i > 0) out += " x ";
    out += kind_name(factors_[i].kind);
    out += ':';
    out += std::to_string(factors_[i].dim);
  }
  return out;
}

Cone polar(const Cone& cone) {
  std::vector<Cone> parts;
  parts.reserve(cone.factors().size());
  for (const Cone::Factor& f : cone.factors()) {
    switch (polar_kind(f.kind)) {
      case ConeKind::Zero: parts.push_back(Cone::zero(f.dim)); break;
      case ConeKind::Free: parts.push_back(Cone::free(f.dim)); break;
      case ConeKind::NonpositiveOrthant: parts.push_back(Cone::nonpositive_orthant(f.dim)); break;
      case ConeKind::NonnegativeOrthant: parts.push_back(Cone::nonnegative_orthant(f.dim)); break;
      case ConeKind::SecondOrder: parts.push_back(Cone::second_order(f.dim)); break;
      case ConeKind::NegativeSecondOrder: parts.push_back(Cone::negative_second_order(f.dim)); break;
    }
  }
  return Cone::product(parts);
}

Vec project(const Cone& cone, const Vec& y) {
  require_dimension(y, cone.dim(), "cone projection");
  Vec out = y;
  Eigen::Index offset = 0;
  for (const Cone::Factor& f : cone.factors()) {
    project_factor(f.kind, out.segment(offset, f.dim));
    offset += f.dim;
  }
  return out;
}

Vec project_polar(const Cone& cone, const Vec& y) { return y - project(cone, y); }

double distance(const Cone& cone, const Vec& y) { return (y - project(cone, y)).norm(); }

bool contains(const Cone& cone, const Vec& y, double tolerance) {
  return distance(cone, y) <= tolerance;
}

Vec project_onto_bounded(const Cone& cone, const Vec& y, double radius) {
  if (!(radius > 0.0)) throw InputError("bounded cone projection: radius must be positive");
  Vec p = project(cone, y);
  const double norm = p.norm();
  if (norm > radius) p *= radius / norm;
  return p;
}

}  // namespace dualscheme
