#include "gfdwa/gpdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace gfdwa {

bool parallel_available() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

void KernelParams::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("kernel sigma must be > 0");
  if (!(length_scale > 0.0)) throw std::invalid_argument("kernel length_scale must be > 0");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("kernel noise_sigma must be >= 0");
}

double kernel_eval(double d, const KernelParams& params) {
  return params.sigma * params.sigma * std::exp(-d / params.length_scale);
}

double inverse_map(double latent, const KernelParams& params) {
  const double s2 = params.sigma * params.sigma;
  const double o = std::clamp(latent, kLatentFloor, s2);
  // -L ln(1) can come out as -0.0
  return std::max(0.0, -params.length_scale * std::log(o / s2));
}

std::vector<Vec2> dedupe_points(std::span<const Vec2> points) {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const Vec2& p : points) {
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Vec2& q) {
      return (p - q).norm() < kDuplicateTolerance;
    });
    if (!dup) out.push_back(p);
  }
  return out;
}

std::vector<Vec2> read_points(std::istream& in) {
  std::vector<Vec2> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x = 0.0;
    double y = 0.0;
    std::string rest;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!(ss >> x) || !(ss >> y) || (ss >> rest)) {
      throw std::runtime_error("point file line " + std::to_string(lineno) +
                               ": expected two coordinates");
    }
    pts.emplace_back(x, y);
  }
  return dedupe_points(pts);
}

GpField GpField::fit(std::span<const Vec2> points, const KernelParams& params) {
  params.validate();
  if (points.empty()) throw std::invalid_argument("cannot fit a distance field to no points");

  GpField f;
  f.params_ = params;
  f.xs_.reserve(points.size());
  f.ys_.reserve(points.size());
  for (const Vec2& p : points) {
    f.xs_.push_back(p.x());
    f.ys_.push_back(p.y());
  }

  Eigen::MatrixXd k = f.gram();
  k.diagonal().array() += params.noise_sigma * params.noise_sigma;
  f.factor_.compute(k);
  if (f.factor_.info() != Eigen::Success) {
    throw SingularKernelMatrix("kernel matrix is not positive definite (" +
                               std::to_string(points.size()) +
                               " points); duplicate points with zero noise?");
  }
  f.alpha_ = f.factor_.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(points.size())));
  if (!f.alpha_.allFinite()) throw SingularKernelMatrix("kernel solve produced non-finite weights");
  return f;
}

Eigen::MatrixXd GpField::gram() const {
  const auto m = static_cast<Eigen::Index>(xs_.size());
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    k(i, i) = kernel_eval(0.0, params_);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d = std::hypot(xs_[i] - xs_[j], ys_[i] - ys_[j]);
      k(i, j) = k(j, i) = kernel_eval(d, params_);
    }
  }
  return k;
}

double GpField::fit_residual() const {
  Eigen::MatrixXd k = gram();
  k.diagonal().array() += params_.noise_sigma * params_.noise_sigma;
  return (k * alpha_ - Eigen::VectorXd::Ones(alpha_.size())).lpNorm<Eigen::Infinity>();
}

GpField::Accum GpField::accumulate(const Vec2& p, bool with_gradient) const {
  Accum acc;
  const double s2 = params_.sigma * params_.sigma;
  const double inv_l = 1.0 / params_.length_scale;
  const std::size_t m = xs_.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = p.x() - xs_[i];
    const double dy = p.y() - ys_[i];
    const double d = std::sqrt(dx * dx + dy * dy);
    const double w = alpha_[static_cast<Eigen::Index>(i)] * s2 * std::exp(-d * inv_l);
    acc.latent += w;
    // the kernel has a cusp at d = 0; its subgradient there is taken as zero
    if (with_gradient && d > 0.0) {
      acc.gx += w * dx / d;
      acc.gy += w * dy / d;
    }
  }
  return acc;
}

double GpField::latent_mean(const Vec2& p) const { return accumulate(p, false).latent; }

double GpField::distance(const Vec2& p) const { return inverse_map(latent_mean(p), params_); }

namespace {

// d/dp of -L ln(o / s2) is (1/o) * sum_i alpha_i k_i u_i, zero inside the clamps.
Vec2 distance_gradient(double latent, double gx, double gy, const KernelParams& params) {
  const double s2 = params.sigma * params.sigma;
  if (latent <= kLatentFloor || latent >= s2) return Vec2::Zero();
  return Vec2(gx, gy) / latent;
}

Vec2 normalized(const Vec2& g) {
  const double n = g.norm();
  if (n < kGradientDegeneracy) return Vec2::Zero();
  return g / n;
}

}  // namespace

Vec2 GpField::raw_gradient(const Vec2& p) const {
  const Accum acc = accumulate(p, true);
  return distance_gradient(acc.latent, acc.gx, acc.gy, params_);
}

Vec2 GpField::gradient(const Vec2& p) const { return normalized(raw_gradient(p)); }

double GpField::variance(const Vec2& p) const {
  const double s2 = params_.sigma * params_.sigma;
  const auto m = static_cast<Eigen::Index>(xs_.size());
  Eigen::VectorXd kstar(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    kstar[i] = kernel_eval(std::hypot(p.x() - xs_[i], p.y() - ys_[i]), params_);
  }
  const Eigen::VectorXd v = factor_.matrixL().solve(kstar);
  return std::clamp(s2 - v.squaredNorm(), 0.0, s2);
}

FieldQuery GpField::query(const Vec2& p) const {
  const Accum acc = accumulate(p, true);
  FieldQuery q;
  q.distance = inverse_map(acc.latent, params_);
  q.gradient = normalized(distance_gradient(acc.latent, acc.gx, acc.gy, params_));
  return q;
}

std::vector<FieldQuery> query_batch(const GpField& field, std::span<const Vec2> points,
                                    Execution exec) {
  std::vector<FieldQuery> out(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = field.query(points[i]);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = field.query(points[i]);
  }
  return out;
}

FieldQuery compose(std::span<const FieldLayer> layers, const Vec2& p) {
  if (layers.empty()) throw std::invalid_argument("compose needs at least one field");
  FieldQuery best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const FieldLayer& layer : layers) {
    FieldQuery q = layer.field->query(p);
    const double d = q.distance - layer.clearance;
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  best.distance = std::max(0.0, best_d);
  return best;
}

FieldQuery compose(std::span<const GpField> fields, const Vec2& p) {
  std::vector<FieldLayer> layers;
  layers.reserve(fields.size());
  for (const GpField& f : fields) layers.push_back({&f, 0.0});
  return compose(layers, p);
}

}  // namespace gfdwa
