#include "jjwash/stationary.hpp"

#include <cmath>
#include <numbers>

#include "jjwash/error.hpp"
#include "jjwash/text_format.hpp"

namespace jjwash {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::minimum: return "minimum";
    case Stability::saddle: return "saddle";
    case Stability::maximum: return "maximum";
    case Stability::degenerate: return "degenerate";
  }
  return "unknown";
}

Stability classify(const VectorXd& eigenvalues, double degenerate_tol) {
  if (eigenvalues.cwiseAbs().minCoeff() < degenerate_tol) return Stability::degenerate;
  if (eigenvalues.minCoeff() > 0.0) return Stability::minimum;
  if (eigenvalues.maxCoeff() < 0.0) return Stability::maximum;
  return Stability::saddle;
}

namespace {

[[noreturn]] void no_convergence(const std::string& why, const VectorXd& x) {
  std::string where;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    where += (i ? ", " : "") + text::format_real(x(i));
  }
  throw Error(ErrorKind::no_convergence, why + " (last iterate " + where + ")");
}

FixedPoint finish(const TiltedPotential& p, const VectorXd& x, double residual,
                  int iterations, const NewtonOptions& options) {
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(p.hessian(x));
  FixedPoint fp;
  fp.x = x;
  fp.eigenvalues = eig.eigenvalues();
  fp.classification = classify(fp.eigenvalues, options.degenerate_eigenvalue);
  fp.residual = residual;
  fp.iterations = iterations;
  return fp;
}

// Newton direction with the Hessian spectrum replaced by max(|lambda|, floor)
// so that the result is always a descent direction for U.
VectorXd modified_newton_step(const MatrixXd& hessian, const VectorXd& g) {
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(hessian);
  const VectorXd& lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  VectorXd inv(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    inv(i) = 1.0 / std::max(std::abs(lambda(i)), 1e-8 * scale);
  }
  const MatrixXd& v = eig.eigenvectors();
  return -(v * inv.asDiagonal() * v.transpose() * g);
}

VectorXd plain_newton_step(const MatrixXd& hessian, const VectorXd& g) {
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(hessian);
  const VectorXd& lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  VectorXd inv(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double l = lambda(i);
    const double floor = 1e-12 * scale;
    inv(i) = std::abs(l) < floor ? 0.0 : 1.0 / l;
  }
  const MatrixXd& v = eig.eigenvectors();
  return -(v * inv.asDiagonal() * v.transpose() * g);
}

void cap(VectorXd& step, double max_norm) {
  const double norm = step.norm();
  if (norm > max_norm) step *= max_norm / norm;
}

}  // namespace

FixedPoint find_fixed_point(const TiltedPotential& p, const VectorXd& seed,
                            const NewtonOptions& options) {
  if (static_cast<std::size_t>(seed.size()) != p.dim()) {
    throw Error(ErrorKind::dimension_mismatch, "seed dimension does not match potential");
  }
  VectorXd x = seed;
  for (int it = 0; it <= options.max_iter; ++it) {
    const VectorXd g = p.gradient(x);
    const double residual = g.cwiseAbs().maxCoeff();
    if (!std::isfinite(residual)) no_convergence("non-finite gradient", x);
    if (residual < options.tolerance) {
      FixedPoint fp = finish(p, x, residual, it, options);
      if (options.target == FixedPointTarget::minimum &&
          (fp.classification == Stability::saddle ||
           fp.classification == Stability::maximum)) {
        no_convergence("reached a " + std::string(to_string(fp.classification)) +
                           ", not a minimum",
                       x);
      }
      return fp;
    }
    if (it == options.max_iter) break;

    const MatrixXd h = p.hessian(x);
    double t = 1.0;
    if (options.target == FixedPointTarget::minimum) {
      VectorXd step = modified_newton_step(h, g);
      cap(step, options.max_step_norm);
      const double u0 = p.energy(x);
      const double slope = g.dot(step);
      for (;;) {
        const VectorXd trial = x + t * step;
        const double u = p.energy(trial);
        if (u <= u0 + options.armijo * t * slope) break;
        // Below rounding level the energy cannot discriminate; fall back on
        // the gradient norm.
        if (std::abs(u - u0) <= 1e-14 * (1.0 + std::abs(u0)) &&
            p.gradient(trial).cwiseAbs().maxCoeff() < residual) {
          break;
        }
        t *= options.backtrack;
        if (t < options.min_step) no_convergence("line search stalled", x);
      }
      x += t * step;
    } else {
      VectorXd step = plain_newton_step(h, g);
      cap(step, options.max_step_norm);
      const double merit0 = 0.5 * g.squaredNorm();
      for (;;) {
        const VectorXd trial = x + t * step;
        const double merit = 0.5 * p.gradient(trial).squaredNorm();
        if (merit <= (1.0 - 2.0 * options.armijo * t) * merit0) break;
        t *= options.backtrack;
        if (t < options.min_step) no_convergence("line search stalled", x);
      }
      x += t * step;
    }
  }
  no_convergence("no fixed point after " + std::to_string(options.max_iter) +
                     " iterations",
                 x);
}

std::vector<FixedPoint> sweep_fixed_points(const TiltedPotential& p, int per_axis,
                                           const NewtonOptions& options,
                                           double merge_tol) {
  const auto n = static_cast<Eigen::Index>(p.dim());
  VectorXd lower(n), spacing(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double period = std::isfinite(p.period()(i)) ? p.period()(i)
                                                       : 2.0 * std::numbers::pi;
    lower(i) = -period / 2;
    spacing(i) = period / per_axis;
  }
  std::vector<FixedPoint> found;
  std::vector<int> index(static_cast<std::size_t>(n), 0);
  for (;;) {
    VectorXd seed(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      seed(i) = lower(i) + spacing(i) * index[static_cast<std::size_t>(i)];
    }
    try {
      FixedPoint fp = find_fixed_point(p, seed, options);
      bool duplicate = false;
      for (const auto& f : found) {
        if ((f.x - fp.x).cwiseAbs().maxCoeff() < merge_tol) duplicate = true;
      }
      if (!duplicate) found.push_back(std::move(fp));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::no_convergence) throw;
    }
    std::size_t axis = 0;
    while (axis < index.size() && ++index[axis] == per_axis) index[axis++] = 0;
    if (axis == index.size()) break;
  }
  return found;
}

}  // namespace jjwash
