#include "gluepour/convex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace gluepour {

ConvexInstance ConvexInstance::from_scenario(const Scenario& s) {
  s.validate();
  ConvexInstance inst;
  for (const auto& e : s.epochs) {
    inst.durations.push_back(e.duration);
    inst.gains.push_back(e.gain);
    inst.arrivals.push_back(e.arrival);
  }
  inst.processing_cost = s.processing_cost;
  inst.battery_capacity = s.battery_capacity;
  return inst;
}

double ConvexInstance::max_violation(std::span<const double> alpha,
                                     std::span<const double> theta) const {
  const std::size_t n = size();
  if (alpha.size() != n || theta.size() != n)
    throw InvalidInput("max_violation: size mismatch");
  double worst = 0.0;
  double harvested = 0.0;
  double spent = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max({worst, -alpha[i], -theta[i], theta[i] - durations[i]});
    harvested += arrivals[i];
    spent += alpha[i] + processing_cost * theta[i];
    const double next = (i + 1 < n) ? arrivals[i + 1] : 0.0;
    worst = std::max(worst, spent - harvested);
    worst = std::max(worst, harvested + next - spent - battery_capacity);
  }
  return worst;
}

ObjectiveGradient objective_and_gradient(const ConvexInstance& inst,
                                         std::span<const double> alpha,
                                         std::span<const double> theta) {
  const std::size_t n = inst.size();
  if (alpha.size() != n || theta.size() != n)
    throw InvalidInput("objective_and_gradient: size mismatch");
  ObjectiveGradient out;
  out.grad_alpha.resize(n);
  out.grad_theta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = alpha[i];
    const double th = theta[i];
    const double h = inst.gains[i];
    if (!(a >= 0.0) || !(th >= 0.0))
      throw InvalidInput("objective_and_gradient: negative input");
    if (th == 0.0) {
      out.grad_alpha[i] = (a == 0.0) ? 0.5 * h : 0.0;
      out.grad_theta[i] =
          (a == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
      continue;
    }
    const double snr = h * a / th;
    out.value += 0.5 * th * std::log1p(snr);
    out.grad_alpha[i] = th * h / (2.0 * (th + h * a));
    out.grad_theta[i] = 0.5 * std::log1p(snr) - h * a / (2.0 * (th + h * a));
  }
  return out;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Block {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Cut the horizon after every epoch whose cumulative consumption is pinned
// to the harvested total (battery forced empty before the next arrival).
std::vector<Block> split_blocks(const ConvexInstance& inst) {
  const std::size_t n = inst.size();
  double scale = 0.0;
  for (double e : inst.arrivals) scale += e;
  const double pin = 1e-12 * std::max(1.0, scale);

  std::vector<Block> blocks;
  std::size_t begin = 0;
  double since_begin = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    since_begin += inst.arrivals[i];
    const double room =
        std::min(since_begin, inst.battery_capacity - inst.arrivals[i + 1]);
    if (room <= pin) {
      blocks.push_back({begin, i + 1});
      begin = i + 1;
      since_begin = 0.0;
    }
  }
  blocks.push_back({begin, n});
  return blocks;
}

// Barrier subproblem for one block. Variables are stacked as
// x = (α_0 .. α_{m-1}, Θ_0 .. Θ_{m-1}); inequality rows read A x <= b and the
// single equality row spends exactly the block's harvest.
class BarrierProblem {
 public:
  BarrierProblem(const ConvexInstance& inst, Block block)
      : m_(block.end - block.begin), eps_(inst.processing_cost) {
    for (std::size_t k = 0; k < m_; ++k) {
      tau_.push_back(inst.durations[block.begin + k]);
      gain_.push_back(inst.gains[block.begin + k]);
      arrival_.push_back(inst.arrivals[block.begin + k]);
    }
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> bounds;
    auto unit = [&](std::size_t col, double coeff) {
      Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(2 * m_);
      r(col) = coeff;
      return r;
    };
    for (std::size_t k = 0; k < m_; ++k) {
      rows.push_back(unit(k, -1.0));
      bounds.push_back(0.0);
      rows.push_back(unit(m_ + k, -1.0));
      bounds.push_back(0.0);
      rows.push_back(unit(m_ + k, 1.0));
      bounds.push_back(tau_[k]);
    }
    double cum = 0.0;
    for (std::size_t k = 0; k < m_; ++k) {
      cum += arrival_[k];
      hi_.push_back(cum);
      lo_.push_back(k + 1 < m_ ? cum + arrival_[k + 1] - inst.battery_capacity
                               : cum - inst.battery_capacity);
      if (k + 1 == m_) break;
      Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(2 * m_);
      for (std::size_t j = 0; j <= k; ++j) {
        r(j) = 1.0;
        r(m_ + j) = eps_;
      }
      rows.push_back(r);
      bounds.push_back(hi_[k]);
      if (lo_[k] > 0.0) {
        rows.push_back(-r);
        bounds.push_back(-lo_[k]);
      }
    }
    total_ = cum;
    a_.resize(static_cast<Eigen::Index>(rows.size()), 2 * m_);
    b_.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      a_.row(r) = rows[r];
      b_(r) = bounds[r];
    }
    eq_ = VectorXd::Zero(2 * m_);
    eq_.head(m_).setOnes();
    eq_.tail(m_).setConstant(eps_);
  }

  std::size_t epochs() const { return m_; }
  double total() const { return total_; }
  Eigen::Index rows() const { return a_.rows(); }

  VectorXd initial_point() const {
    VectorXd x(2 * m_);
    double prev = 0.0;
    for (std::size_t k = 0; k < m_; ++k) {
      double cumulative = total_;
      if (k + 1 < m_) {
        const double w = static_cast<double>(k + 1) / static_cast<double>(m_);
        cumulative = w * hi_[k] + (1.0 - w) * std::max(lo_[k], 0.0);
      }
      const double c = cumulative - prev;
      prev = cumulative;
      const double th =
          eps_ > 0.0 ? std::min(0.5 * tau_[k], 0.5 * c / eps_) : 0.5 * tau_[k];
      x(k) = c - eps_ * th;
      x(m_ + k) = th;
    }
    return x;
  }

  bool slacks(const VectorXd& x, VectorXd& s) const {
    s = b_ - a_ * x;
    return (s.array() > 0.0).all();
  }

  double objective(const VectorXd& x) const {
    double g = 0.0;
    for (std::size_t k = 0; k < m_; ++k)
      g += 0.5 * x(m_ + k) * std::log1p(gain_[k] * x(k) / x(m_ + k));
    return g;
  }

  // Gradient and Hessian of the (concave) objective.
  void derivatives(const VectorXd& x, VectorXd& grad, MatrixXd& hess) const {
    grad = VectorXd::Zero(2 * m_);
    hess = MatrixXd::Zero(2 * m_, 2 * m_);
    for (std::size_t k = 0; k < m_; ++k) {
      const double a = x(k);
      const double th = x(m_ + k);
      const double h = gain_[k];
      const double ratio = a / th;
      const double denom = 1.0 + h * ratio;
      grad(k) = h / (2.0 * denom);
      grad(m_ + k) = 0.5 * std::log1p(h * ratio) - h * ratio / (2.0 * denom);
      const double curv = -h * h / (2.0 * denom * denom) / th;
      hess(k, k) = curv;
      hess(k, m_ + k) = hess(m_ + k, k) = -ratio * curv;
      hess(m_ + k, m_ + k) = ratio * ratio * curv;
    }
  }

  // t·g(x) + Σ ln s_r, maximized along the central path.
  double merit(const VectorXd& x, const VectorXd& s, double t) const {
    return t * objective(x) + s.array().log().sum();
  }

  const MatrixXd& a() const { return a_; }
  const VectorXd& eq() const { return eq_; }

 private:
  std::size_t m_;
  double eps_;
  std::vector<double> tau_, gain_, arrival_, hi_, lo_;
  double total_ = 0.0;
  MatrixXd a_;
  VectorXd b_;
  VectorXd eq_;
};

struct BlockOutcome {
  VectorXd x;
  double gap = 0.0;
  bool converged = false;
};

BlockOutcome solve_block(const BarrierProblem& prob, std::size_t block_index,
                         const ConvexOptions& options, std::size_t& iterations,
                         std::vector<ConvexIterate>& trace) {
  constexpr double kGrowth = 20.0;
  constexpr double kArmijo = 0.25;
  const double rows = static_cast<double>(prob.rows());
  const Eigen::Index dim = static_cast<Eigen::Index>(2 * prob.epochs());

  BlockOutcome out;
  out.x = prob.initial_point();
  VectorXd s;
  if (!prob.slacks(out.x, s))
    throw std::logic_error("solve_convex: start point is not interior");

  double t = 1.0;
  double decrement = 0.0;
  for (;;) {
    // Centering: maximize the merit at fixed t subject to the equality row.
    for (;;) {
      if (iterations >= options.max_iterations) {
        out.gap = rows / t + decrement / t;
        return out;
      }
      VectorXd grad;
      MatrixXd hess;
      prob.derivatives(out.x, grad, hess);
      const VectorXd inv_s = s.cwiseInverse();
      // Work with the minimization form f = -merit.
      const VectorXd grad_f = -t * grad + prob.a().transpose() * inv_s;
      const MatrixXd hess_f =
          -t * hess + prob.a().transpose() * inv_s.cwiseAbs2().asDiagonal() *
                          prob.a();

      const VectorXd scale = hess_f.diagonal().cwiseSqrt().cwiseInverse();
      const MatrixXd scaled = scale.asDiagonal() * hess_f * scale.asDiagonal();
      Eigen::LDLT<MatrixXd> ldlt(scaled);
      const VectorXd u = scale.cwiseProduct(
          ldlt.solve(scale.cwiseProduct(-grad_f)));
      const VectorXd w =
          scale.cwiseProduct(ldlt.solve(scale.cwiseProduct(prob.eq())));
      const double cw = prob.eq().dot(w);
      VectorXd dx = u - w * (prob.eq().dot(u) / cw);
      // The reduced solve loses accuracy as slacks vanish; keep Σ consumption
      // pinned by removing any residual component along the equality row.
      dx -= prob.eq() * (prob.eq().dot(dx) / prob.eq().squaredNorm());
      decrement = std::max(0.0, -grad_f.dot(dx));
      if (!dx.allFinite()) break;
      // Suboptimality of the centering step is about decrement/(2t) in nats.
      if (decrement / 2.0 <= 1e-10 || decrement / (2.0 * t) <= 1e-2 * options.tol)
        break;

      const double f0 = -prob.merit(out.x, s, t);
      double step = 1.0;
      VectorXd candidate(dim);
      VectorXd cand_s;
      bool accepted = false;
      for (int halvings = 0; halvings < 80; ++halvings, step *= 0.5) {
        candidate = out.x + step * dx;
        if (!prob.slacks(candidate, cand_s)) continue;
        const double f1 = -prob.merit(candidate, cand_s, t);
        if (f1 < f0 && f1 <= f0 - kArmijo * step * decrement) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;  // rounding floor reached
      out.x = candidate;
      s = cand_s;
      ++iterations;
      trace.push_back({block_index, t, prob.objective(out.x),
                       prob.merit(out.x, s, t) / t});
    }
    out.gap = rows / t + decrement / (2.0 * t);
    if (rows / t <= options.tol) break;
    t *= kGrowth;
  }
  out.converged = true;
  return out;
}

}  // namespace

ConvexResult solve_convex(const Scenario& s, const ConvexOptions& options) {
  const ConvexInstance inst = ConvexInstance::from_scenario(s);
  const std::size_t n = inst.size();

  ConvexResult result;
  result.alpha.assign(n, 0.0);
  result.theta.assign(n, 0.0);
  result.certified = true;

  std::size_t block_index = 0;
  for (const Block& block : split_blocks(inst)) {
    const BarrierProblem prob(inst, block);
    ++block_index;
    if (prob.total() <= 0.0) continue;
    const BlockOutcome outcome = solve_block(prob, block_index - 1, options,
                                             result.iterations, result.trace);
    result.certified = result.certified && outcome.converged;
    result.duality_gap += outcome.gap;
    for (std::size_t k = 0; k < prob.epochs(); ++k) {
      result.alpha[block.begin + k] = outcome.x(static_cast<Eigen::Index>(k));
      result.theta[block.begin + k] =
          outcome.x(static_cast<Eigen::Index>(prob.epochs() + k));
    }
  }

  // Recover (Θ, p), snapping the barrier's residual activity.
  const double energy_floor = 1e-8 * std::max(1.0, s.total_energy());
  result.policy = TransmissionPolicy(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = inst.durations[i];
    const double a = result.alpha[i];
    const double th = result.theta[i];
    if (th < 1e-6 * tau || a <= energy_floor) continue;
    if (tau - th < 1e-6 * tau) {
      const double energy = a + inst.processing_cost * th;
      result.policy[i] = {tau, std::max(0.0, energy / tau - inst.processing_cost)};
    } else {
      result.policy[i] = {th, a / th};
    }
  }
  result.value = evaluate_throughput(s, result.policy);
  if (result.duality_gap > 1e3 * options.tol ||
      inst.max_violation(result.alpha, result.theta) > 1e-8)
    result.certified = false;
  return result;
}

}  // namespace gluepour
