#pragma once

#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gfdwa/execution.hpp"
#include "gfdwa/types.hpp"

namespace gfdwa {

class SingularKernelMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matérn nu=1/2 covariance k(d) = sigma^2 exp(-d / length_scale) plus the
/// observation noise used in the regression.
struct KernelParams {
  double sigma = 1.0;
  double length_scale = 0.2;
  double noise_sigma = 0.01;

  /// Throws std::invalid_argument when a parameter is out of range.
  void validate() const;
};

/// Latent values below this are treated as the far field before the log.
inline constexpr double kLatentFloor = 1e-12;
/// Raw gradients shorter than this are reported as the zero vector.
inline constexpr double kGradientDegeneracy = 1e-9;
/// Points closer than this are merged on ingestion.
inline constexpr double kDuplicateTolerance = 1e-9;

double kernel_eval(double d, const KernelParams& params);

/// Inverse radial profile of the kernel, clamped so the result is finite
/// and non-negative.
double inverse_map(double latent, const KernelParams& params);

struct FieldQuery {
  double distance = 0.0;
  /// Unit direction of increasing distance, or zero at degenerate points.
  Vec2 gradient = Vec2::Zero();
  std::optional<double> latent_variance;
};

/// Drops points within kDuplicateTolerance of an earlier point; keeps order.
std::vector<Vec2> dedupe_points(std::span<const Vec2> points);

/// Reads one point per line ("x y" or "x,y"); blank lines and '#' comments
/// are skipped. The result is deduplicated.
std::vector<Vec2> read_points(std::istream& in);

/// Gaussian process distance field over a fixed obstacle point set.
///
/// The latent occupancy mean is o(p) = k(p, P) alpha with
/// alpha = (K + noise^2 I)^-1 1, and the distance is inverse_map(o(p)).
/// Immutable once fitted; all queries are const and thread-safe.
class GpField {
 public:
  /// Throws std::invalid_argument on an empty point set and
  /// SingularKernelMatrix when K + noise^2 I is not positive definite.
  static GpField fit(std::span<const Vec2> points, const KernelParams& params);

  double latent_mean(const Vec2& p) const;
  double distance(const Vec2& p) const;
  /// Analytic gradient of distance(); zero where the clamps are active.
  Vec2 raw_gradient(const Vec2& p) const;
  /// raw_gradient normalized to unit length, or zero when degenerate.
  Vec2 gradient(const Vec2& p) const;
  double variance(const Vec2& p) const;

  /// Distance and normalized gradient from a single pass over the points.
  FieldQuery query(const Vec2& p) const;

  std::size_t size() const { return xs_.size(); }
  Vec2 point(std::size_t i) const { return {xs_[i], ys_[i]}; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const KernelParams& params() const { return params_; }

  /// Infinity norm of (K + noise^2 I) alpha - 1.
  double fit_residual() const;

 private:
  struct Accum {
    double latent = 0.0;
    double gx = 0.0;
    double gy = 0.0;
  };
  Accum accumulate(const Vec2& p, bool with_gradient) const;
  Eigen::MatrixXd gram() const;

  KernelParams params_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  Eigen::VectorXd alpha_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

/// Evaluates query() at many points.
std::vector<FieldQuery> query_batch(const GpField& field, std::span<const Vec2> points,
                                    Execution exec = Execution::Parallel);

/// One input to a min-composition: a field and a clearance subtracted from
/// its distance before comparison.
struct FieldLayer {
  const GpField* field = nullptr;
  double clearance = 0.0;
};

/// Min-composition over layers. The gradient comes from the layer with the
/// smallest (offset) distance; ties go to the lowest index. The composed
/// distance is clamped at zero.
FieldQuery compose(std::span<const FieldLayer> layers, const Vec2& p);
FieldQuery compose(std::span<const GpField> fields, const Vec2& p);

}  // namespace gfdwa
