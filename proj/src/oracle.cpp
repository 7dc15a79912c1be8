#include "scopt/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>

#include "scopt/errors.hpp"

namespace scopt {

ScOracle::Eval ScOracle::eval(const Eigen::VectorXd& x) const {
  Eval e;
  e.value = value(x);
  e.grad = gradient(x);
  e.hess = hessian(x);
  return e;
}

Eigen::VectorXd BarrierOracle::analytic_center() const {
  throw InvalidProblemError("barrier has no closed-form analytic center");
}

LocalGeometry geometry_at(const ScOracle& f, const Eigen::VectorXd& x) {
  if (x.size() != f.dim()) {
    throw DimensionError("point dimension does not match oracle");
  }
  if (!f.in_domain(x)) {
    throw DomainError("point outside oracle domain");
  }
  return LocalGeometry(f.hessian(x));
}

double newton_decrement(const ScOracle& f, const Eigen::VectorXd& x) {
  return newton_decrement(f, x, geometry_at(f, x));
}

double newton_decrement(const ScOracle& f, const Eigen::VectorXd& x,
                        const LocalGeometry& geom) {
  return geom.dual_norm(f.gradient(x));
}

namespace {

class ShiftedOracle final : public ScOracle {
 public:
  ShiftedOracle(std::shared_ptr<const ScOracle> base, Eigen::VectorXd shift,
                double weight)
      : base_(std::move(base)), shift_(std::move(shift)), weight_(weight) {
    if (shift_.size() != base_->dim()) {
      throw DimensionError("shift dimension does not match oracle");
    }
  }

  int dim() const override { return base_->dim(); }
  double sc_constant() const override { return base_->sc_constant(); }
  bool in_domain(const Eigen::VectorXd& x) const override {
    return base_->in_domain(x);
  }
  double value(const Eigen::VectorXd& x) const override {
    return base_->value(x) + weight_ * shift_.dot(x);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    return base_->gradient(x) + weight_ * shift_;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    return base_->hessian(x);
  }
  Eval eval(const Eigen::VectorXd& x) const override {
    Eval e = base_->eval(x);
    e.value += weight_ * shift_.dot(x);
    e.grad += weight_ * shift_;
    return e;
  }

 private:
  std::shared_ptr<const ScOracle> base_;
  Eigen::VectorXd shift_;
  double weight_;
};

class NormalizedOracle final : public ScOracle {
 public:
  explicit NormalizedOracle(std::shared_ptr<const ScOracle> base)
      : base_(std::move(base)), scale_(base_->sc_constant()) {
    if (!(scale_ > 0.0) || !std::isfinite(scale_)) {
      throw InvalidProblemError(
          "normalization requires a positive finite sc constant");
    }
    scale_ *= scale_;
  }

  int dim() const override { return base_->dim(); }
  double sc_constant() const override { return 1.0; }
  bool in_domain(const Eigen::VectorXd& x) const override {
    return base_->in_domain(x);
  }
  double value(const Eigen::VectorXd& x) const override {
    return scale_ * base_->value(x);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    return scale_ * base_->gradient(x);
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    return scale_ * base_->hessian(x);
  }
  Eval eval(const Eigen::VectorXd& x) const override {
    Eval e = base_->eval(x);
    e.value *= scale_;
    e.grad *= scale_;
    e.hess *= scale_;
    return e;
  }

 private:
  std::shared_ptr<const ScOracle> base_;
  double scale_;  // M^2
};

}  // namespace

std::shared_ptr<ScOracle> shifted_oracle(std::shared_ptr<const ScOracle> f,
                                         Eigen::VectorXd shift,
                                         double weight) {
  return std::make_shared<ShiftedOracle>(std::move(f), std::move(shift),
                                         weight);
}

std::shared_ptr<ScOracle> normalize_to_standard(
    std::shared_ptr<const ScOracle> f) {
  return std::make_shared<NormalizedOracle>(std::move(f));
}

AffineRestrictedOracle::AffineRestrictedOracle(
    std::shared_ptr<const ScOracle> base, Eigen::VectorXd x0,
    Eigen::MatrixXd basis)
    : base_(std::move(base)), x0_(std::move(x0)), basis_(std::move(basis)) {
  if (x0_.size() != base_->dim() || basis_.rows() != base_->dim()) {
    throw DimensionError("affine restriction shapes do not match oracle");
  }
  if (basis_.cols() < 1) {
    throw InvalidProblemError("affine restriction needs a nonempty basis");
  }
  const Eigen::MatrixXd gram =
      basis_.transpose() * basis_ -
      Eigen::MatrixXd::Identity(basis_.cols(), basis_.cols());
  if (gram.cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidProblemError("affine restriction basis is not orthonormal");
  }
}

int AffineRestrictedOracle::dim() const {
  return static_cast<int>(basis_.cols());
}

double AffineRestrictedOracle::sc_constant() const {
  return base_->sc_constant();
}

Eigen::VectorXd AffineRestrictedOracle::embed(const Eigen::VectorXd& w) const {
  if (w.size() != basis_.cols()) {
    throw DimensionError("restricted point has wrong dimension");
  }
  return x0_ + basis_ * w;
}

bool AffineRestrictedOracle::in_domain(const Eigen::VectorXd& w) const {
  return base_->in_domain(embed(w));
}

double AffineRestrictedOracle::value(const Eigen::VectorXd& w) const {
  return base_->value(embed(w));
}

Eigen::VectorXd AffineRestrictedOracle::gradient(
    const Eigen::VectorXd& w) const {
  return basis_.transpose() * base_->gradient(embed(w));
}

Eigen::MatrixXd AffineRestrictedOracle::hessian(
    const Eigen::VectorXd& w) const {
  return basis_.transpose() * base_->hessian(embed(w)) * basis_;
}

ScOracle::Eval AffineRestrictedOracle::eval(const Eigen::VectorXd& w) const {
  Eval e = base_->eval(embed(w));
  e.grad = basis_.transpose() * e.grad;
  e.hess = basis_.transpose() * e.hess * basis_;
  return e;
}

Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.cols();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
  const Eigen::Index rank = qr.rank();
  const Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - rank);
}

Eigen::VectorXd particular_solution(const Eigen::MatrixXd& a,
                                    const Eigen::VectorXd& b) {
  if (b.size() != a.rows()) {
    throw DimensionError("right-hand side does not match matrix rows");
  }
  const Eigen::VectorXd x =
      a.completeOrthogonalDecomposition().solve(b);
  const double residual = (a * x - b).norm();
  if (!(residual <= 1e-9 * (1.0 + b.norm()))) {
    throw InvalidProblemError("linear system A x = b has no solution");
  }
  return x;
}

AuditReport audit_self_concordance(const ScOracle& f,
                                   const std::vector<Eigen::VectorXd>& points,
                                   int directions_per_point,
                                   std::uint64_t seed, double tol,
                                   double fd_scale) {
  AuditReport report;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double m = f.sc_constant();
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Eigen::VectorXd& x = points[pi];
    if (!f.in_domain(x)) {
      throw DomainError("audit point outside oracle domain");
    }
    const LocalGeometry geom = geometry_at(f, x);
    for (int di = 0; di < directions_per_point; ++di) {
      Eigen::VectorXd h(x.size());
      for (Eigen::Index i = 0; i < h.size(); ++i) {
        h[i] = gauss(rng);
      }
      const double local = geom.primal_norm(h);
      if (!(local > 0.0)) {
        continue;
      }
      h /= local;  // unit local norm, so the bound is |D3| <= 2 M
      // Step small enough that both x +/- delta h stay in the domain: the
      // Dikin radius at unit local norm is 1/M.
      double delta = fd_scale / (1.0 + m);
      while (delta > 1e-12 &&
             (!f.in_domain(x + delta * h) || !f.in_domain(x - delta * h))) {
        delta *= 0.5;
      }
      if (!(f.in_domain(x + delta * h) && f.in_domain(x - delta * h))) {
        continue;
      }
      const double qp = h.dot(f.hessian(x + delta * h) * h);
      const double qm = h.dot(f.hessian(x - delta * h) * h);
      const double third = (qp - qm) / (2.0 * delta);
      const double bound = 2.0 * m;  // 2 M ||h||_x^3 with ||h||_x = 1
      const double ratio = std::abs(third) / bound;
      ++report.checked;
      if (ratio > report.worst_ratio) {
        report.worst_ratio = ratio;
        std::ostringstream loc;
        loc << "point " << pi << " direction " << di;
        report.worst_location = loc.str();
      }
      if (ratio > 1.0 + tol) {
        report.ok = false;
      }
    }
  }
  return report;
}

}  // namespace scopt
