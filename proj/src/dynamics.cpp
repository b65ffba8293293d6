#include "jjwash/dynamics.hpp"

#include <cmath>
#include <random>

#include "jjwash/error.hpp"
#include "jjwash/text_format.hpp"

namespace jjwash {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::underdamped: return "underdamped";
    case Scheme::overdamped: return "overdamped";
    case Scheme::hamiltonian: return "hamiltonian";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "underdamped") return Scheme::underdamped;
  if (name == "overdamped") return Scheme::overdamped;
  if (name == "hamiltonian") return Scheme::hamiltonian;
  throw Error(ErrorKind::invalid_config, "unknown scheme '" + std::string(name) + "'");
}

void validate(const SimulationConfig& cfg, const TiltedPotential& p) {
  auto invalid = [](const std::string& what) {
    throw Error(ErrorKind::invalid_config, what);
  };
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) invalid("dt must be positive");
  if (cfg.n_steps == 0) invalid("n_steps must be positive");
  if (cfg.record_stride == 0) invalid("record_stride must be positive");
  if (cfg.max_retries < 0) invalid("max_retries must be non-negative");
  if (cfg.scheme != Scheme::overdamped && !(cfg.beta_c > 0.0)) {
    invalid("beta_c must be positive for the " + std::string(to_string(cfg.scheme)) +
            " scheme");
  }
  if (cfg.scheme == Scheme::hamiltonian && p.omega_noise() != 0.0) {
    invalid("the hamiltonian scheme requires omega_noise = 0");
  }
  if (p.omega_noise() < 0.0) invalid("omega_noise must be non-negative");
}

MatrixXd noise_factor(const MatrixXd& cov) {
  if (cov.rows() != cov.cols()) throw Error(ErrorKind::not_psd, "covariance is not square");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + cov.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::not_psd, "covariance is not symmetric");
  }
  const MatrixXd off = cov - MatrixXd(cov.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() == 0.0) {
    if (cov.diagonal().minCoeff() < 0.0) {
      throw Error(ErrorKind::not_psd, "covariance has a negative variance");
    }
    return MatrixXd(cov.diagonal().cwiseSqrt().asDiagonal());
  }
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  const VectorXd& lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() < -1e-12 * scale) {
    throw Error(ErrorKind::not_psd, "covariance has eigenvalue " +
                                        text::format_real(lambda.minCoeff()));
  }
  const VectorXd root = lambda.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

namespace {

struct Blowup {
  std::uint64_t step;
};

class Integrator {
 public:
  Integrator(const TiltedPotential& p, const SimulationConfig& cfg)
      : p_(p),
        cfg_(cfg),
        n_(static_cast<Eigen::Index>(p.dim())),
        factor_(noise_factor(p.noise_cov())),
        diagonal_factor_((factor_ - MatrixXd(factor_.diagonal().asDiagonal()))
                             .cwiseAbs()
                             .maxCoeff() == 0.0),
        noisy_(factor_.cwiseAbs().maxCoeff() > 0.0 && cfg.scheme != Scheme::hamiltonian),
        draws_(n_),
        kick_(n_),
        kick_noise_(n_),
        grad_(n_) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                      static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(cfg.stream),
                      static_cast<std::uint32_t>(cfg.stream >> 32)};
    rng_.seed(seq);
  }

  Trajectory run(const State& init) {
    const double dt = cfg_.dt;
    VectorXd x = init.x;
    VectorXd v = init.v.size() == 0 ? VectorXd::Zero(n_) : init.v;
    const bool with_velocity = cfg_.scheme != Scheme::overdamped;

    Trajectory traj;
    traj.scheme = cfg_.scheme;
    traj.seed = cfg_.seed;
    traj.stream = cfg_.stream;
    traj.dt = dt;
    traj.n_steps = cfg_.n_steps;
    const std::size_t frames = cfg_.n_steps / cfg_.record_stride + 1;
    traj.times.reserve(frames);
    traj.positions.reserve(frames);
    if (with_velocity) traj.velocities.reserve(frames);
    auto record = [&](std::uint64_t step) {
      traj.times.push_back(static_cast<double>(step) * dt);
      traj.positions.push_back(x);
      if (with_velocity) traj.velocities.push_back(v);
    };
    record(0);

    VectorXd xp(n_), vp(n_), ap(n_), a0(n_);
    const double sqrt_dt = std::sqrt(dt);
    for (std::uint64_t step = 1; step <= cfg_.n_steps; ++step) {
      switch (cfg_.scheme) {
        case Scheme::overdamped: {
          force(x, a0);  // -grad U
          x += dt * a0;
          if (noisy_) x += sqrt_dt * noise();
          break;
        }
        case Scheme::underdamped: {
          const double inv_beta = 1.0 / cfg_.beta_c;
          force(x, a0);
          a0 = inv_beta * (a0 - v);
          if (noisy_) {
            kick_ = (sqrt_dt * inv_beta) * noise();
          } else {
            kick_.setZero();
          }
          xp = x + dt * v;
          vp = v + dt * a0 + kick_;
          force(xp, ap);
          ap = inv_beta * (ap - vp);
          x += (0.5 * dt) * (v + vp);
          v += (0.5 * dt) * (a0 + ap) + kick_;
          break;
        }
        case Scheme::hamiltonian: {
          const double inv_beta = 1.0 / cfg_.beta_c;
          force(x, a0);
          v += (0.5 * dt * inv_beta) * a0;
          x += dt * v;
          force(x, a0);
          v += (0.5 * dt * inv_beta) * a0;
          break;
        }
      }
      for (Eigen::Index i = 0; i < n_; ++i) {
        if (!(std::abs(x(i)) <= cfg_.blowup_threshold) ||
            (with_velocity && !(std::abs(v(i)) <= cfg_.blowup_threshold))) {
          throw Blowup{step};
        }
      }
      if (step % cfg_.record_stride == 0) record(step);
    }
    return traj;
  }

 private:
  // -grad U, or zero in the pure-diffusion diagnostic.
  void force(const VectorXd& x, VectorXd& out) {
    if (cfg_.drop_drift) {
      out.setZero();
      return;
    }
    p_.gradient_into(x.data(), grad_.data());
    out = -grad_;
  }

  // L * standard normal vector.
  const VectorXd& noise() {
    for (Eigen::Index i = 0; i < n_; ++i) draws_(i) = normal_(rng_);
    if (diagonal_factor_) {
      kick_noise_ = factor_.diagonal().cwiseProduct(draws_);
    } else {
      kick_noise_.noalias() = factor_ * draws_;
    }
    return kick_noise_;
  }

  const TiltedPotential& p_;
  const SimulationConfig& cfg_;
  Eigen::Index n_;
  MatrixXd factor_;
  bool diagonal_factor_;
  bool noisy_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  VectorXd draws_;
  VectorXd kick_;
  VectorXd kick_noise_;
  VectorXd grad_;
};

}  // namespace

Trajectory simulate(const TiltedPotential& p, const SimulationConfig& cfg,
                    const State& init) {
  validate(cfg, p);
  const auto n = static_cast<Eigen::Index>(p.dim());
  if (init.x.size() != n || (init.v.size() != 0 && init.v.size() != n)) {
    throw Error(ErrorKind::dimension_mismatch,
                "initial state does not match the potential dimension");
  }
  SimulationConfig attempt = cfg;
  for (int retry = 0;; ++retry) {
    try {
      Integrator integrator(p, attempt);
      Trajectory traj = integrator.run(init);
      traj.retries = retry;
      return traj;
    } catch (const Blowup& b) {
      if (retry >= cfg.max_retries) {
        throw Error(ErrorKind::numerical_blowup,
                    "state exceeded " + text::format_real(cfg.blowup_threshold) +
                        " at step " + std::to_string(b.step) + " (dt = " +
                        text::format_real(attempt.dt) + ", after " +
                        std::to_string(retry) + " halvings)");
      }
      // Same recorded times with a finer step.
      attempt.dt /= 2;
      attempt.n_steps *= 2;
      attempt.record_stride *= 2;
    }
  }
}

VectorXd mean_voltage(const Trajectory& traj, double window) {
  if (!(window > 0.0 && window <= 1.0)) {
    throw Error(ErrorKind::invalid_config, "window must lie in (0, 1]");
  }
  if (traj.times.size() < 2) {
    throw Error(ErrorKind::empty_trajectory, "trajectory has fewer than two frames");
  }
  const double t_end = traj.times.back();
  const double t_start = t_end - window * (t_end - traj.times.front());
  std::size_t first = 0;
  while (first < traj.times.size() && traj.times[first] < t_start) ++first;
  const std::size_t last = traj.times.size() - 1;
  if (first >= last) {
    throw Error(ErrorKind::empty_trajectory, "averaging window holds fewer than two frames");
  }
  const double span = traj.times[last] - traj.times[first];
  if (!traj.has_velocities()) {
    return (traj.positions[last] - traj.positions[first]) / span;
  }
  VectorXd integral = VectorXd::Zero(traj.velocities[first].size());
  for (std::size_t i = first; i < last; ++i) {
    const double h = traj.times[i + 1] - traj.times[i];
    integral += 0.5 * h * (traj.velocities[i] + traj.velocities[i + 1]);
  }
  return integral / span;
}

std::vector<double> energy_series(const Trajectory& traj, const TiltedPotential& p,
                                  double beta_c) {
  if (!traj.has_velocities()) {
    throw Error(ErrorKind::missing_velocities,
                "energy needs recorded velocities (overdamped runs have none)");
  }
  std::vector<double> h(traj.positions.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] = 0.5 * beta_c * traj.velocities[i].squaredNorm() + p.energy(traj.positions[i]);
  }
  return h;
}

}  // namespace jjwash
