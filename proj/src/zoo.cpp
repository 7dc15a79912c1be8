#include "scopt/zoo.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "scopt/conjugate.hpp"
#include "scopt/errors.hpp"

namespace scopt {

namespace {

constexpr double kBoundaryMargin = 1e-14;

// mt19937_64 is bit-exact across platforms; the Gaussian transform is done
// by hand because std::normal_distribution is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1p-53;
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) {
      u1 = uniform();
    }
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

class ScalarXlnx final : public ScOracle {
 public:
  int dim() const override { return 1; }
  double sc_constant() const override { return 1.0; }
  bool in_domain(const Eigen::VectorXd& x) const override {
    return x.size() == 1 && x[0] > kBoundaryMargin;
  }
  double value(const Eigen::VectorXd& x) const override {
    return x[0] - std::log(x[0]);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    Eigen::VectorXd g(1);
    g[0] = 1.0 - 1.0 / x[0];
    return g;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = 1.0 / (x[0] * x[0]);
    return h;
  }
};

class BoxBarrier final : public BarrierOracle {
 public:
  explicit BoxBarrier(int n) : n_(n) {
    if (n < 1) {
      throw InvalidProblemError("box barrier needs dimension >= 1");
    }
  }
  int dim() const override { return n_; }
  double nu() const override { return 2.0 * n_; }
  bool has_analytic_center() const override { return true; }
  Eigen::VectorXd analytic_center() const override {
    return Eigen::VectorXd::Zero(n_);
  }
  bool in_domain(const Eigen::VectorXd& x) const override {
    if (x.size() != n_) {
      return false;
    }
    return (1.0 - x.cwiseAbs().maxCoeff()) > kBoundaryMargin;
  }
  // The factored forms keep full precision within 1e-14 of the walls, where
  // 1 - x^2 itself loses half its digits to cancellation.
  double value(const Eigen::VectorXd& x) const override {
    double v = 0.0;
    for (int i = 0; i < n_; ++i) {
      v -= std::log1p(-x[i]) + std::log1p(x[i]);
    }
    return v;
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    Eigen::VectorXd g(n_);
    for (int i = 0; i < n_; ++i) {
      g[i] = 1.0 / (1.0 - x[i]) - 1.0 / (1.0 + x[i]);
    }
    return g;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i) {
      const double lo = 1.0 - x[i];
      const double hi = 1.0 + x[i];
      h(i, i) = 1.0 / (lo * lo) + 1.0 / (hi * hi);
    }
    return h;
  }

 private:
  int n_;
};

class SimplexBarrier final : public BarrierOracle {
 public:
  explicit SimplexBarrier(int n) : n_(n) {
    if (n < 1) {
      throw InvalidProblemError("simplex barrier needs dimension >= 1");
    }
  }
  int dim() const override { return n_; }
  double nu() const override { return n_ + 1.0; }
  bool has_analytic_center() const override { return true; }
  Eigen::VectorXd analytic_center() const override {
    return Eigen::VectorXd::Constant(n_, 1.0 / (n_ + 1.0));
  }
  bool in_domain(const Eigen::VectorXd& x) const override {
    if (x.size() != n_) {
      return false;
    }
    if (x.minCoeff() <= kBoundaryMargin) {
      return false;
    }
    return 1.0 - x.sum() > kBoundaryMargin;
  }
  double value(const Eigen::VectorXd& x) const override {
    double v = -std::log(1.0 - x.sum());
    for (int i = 0; i < n_; ++i) {
      v -= std::log(x[i]);
    }
    return v;
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    const double slack = 1.0 - x.sum();
    return Eigen::VectorXd::Constant(n_, 1.0 / slack) -
           x.cwiseInverse();
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    const double slack = 1.0 - x.sum();
    Eigen::MatrixXd h =
        Eigen::MatrixXd::Constant(n_, n_, 1.0 / (slack * slack));
    for (int i = 0; i < n_; ++i) {
      h(i, i) += 1.0 / (x[i] * x[i]);
    }
    return h;
  }

 private:
  int n_;
};

class LogisticOracle final : public LipschitzStrongOracle {
 public:
  LogisticOracle(Eigen::MatrixXd a, Eigen::VectorXd labels, double sigma)
      : a_(std::move(a)), labels_(std::move(labels)), sigma_(sigma) {
    if (labels_.size() != a_.rows()) {
      throw DimensionError("logistic labels do not match rows");
    }
    if (!(sigma_ > 0.0)) {
      throw InvalidProblemError("logistic regularization must be positive");
    }
    double h = 0.0;
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      const double norm = a_.row(i).norm();
      h += norm * norm * norm;
    }
    h_f_ = h / (6.0 * std::sqrt(3.0));
  }

  int dim() const override { return static_cast<int>(a_.cols()); }
  double sigma_strong() const override { return sigma_; }
  double hess_lipschitz() const override { return h_f_; }
  bool in_domain(const Eigen::VectorXd& x) const override {
    return x.size() == a_.cols();
  }
  double value(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd t = labels_.cwiseProduct(a_ * x);
    double v = 0.5 * sigma_ * x.squaredNorm();
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      // ln(1+exp(-t)) computed without overflow for large |t|.
      v += t[i] > 0.0 ? std::log1p(std::exp(-t[i]))
                      : -t[i] + std::log1p(std::exp(t[i]));
    }
    return v;
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd t = labels_.cwiseProduct(a_ * x);
    Eigen::VectorXd w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      w[i] = -labels_[i] / (1.0 + std::exp(t[i]));
    }
    return a_.transpose() * w + sigma_ * x;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd t = labels_.cwiseProduct(a_ * x);
    Eigen::VectorXd w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double p = 1.0 / (1.0 + std::exp(-t[i]));
      w[i] = p * (1.0 - p);
    }
    return a_.transpose() * w.asDiagonal() * a_ +
           sigma_ * Eigen::MatrixXd::Identity(dim(), dim());
  }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd labels_;
  double sigma_;
  double h_f_;
};

}  // namespace

LseOracle::LseOracle(Eigen::MatrixXd a, Eigen::VectorXd offsets, double mu,
                     double sigma)
    : a_(std::move(a)),
      offsets_(std::move(offsets)),
      mu_(mu),
      sigma_(sigma) {
  if (a_.rows() < 1 || a_.cols() < 1) {
    throw InvalidProblemError("lse needs a nonempty row matrix");
  }
  if (offsets_.size() == 0) {
    offsets_ = Eigen::VectorXd::Zero(a_.rows());
  }
  if (offsets_.size() != a_.rows()) {
    throw DimensionError("lse offsets do not match rows");
  }
  if (!(mu_ > 0.0) || !(sigma_ > 0.0)) {
    throw InvalidProblemError("lse needs positive smoothing and ridge");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a_);
  const double opnorm = svd.singularValues()[0];
  h_declared_ = 2.0 * opnorm * opnorm * opnorm / (mu_ * mu_);
  m_declared_ = sc_constant_from_lipschitz(sigma_, h_declared_);
}

int LseOracle::dim() const { return static_cast<int>(a_.cols()); }

double LseOracle::sc_constant() const { return m_declared_; }

double LseOracle::sigma_strong() const { return sigma_; }

double LseOracle::hess_lipschitz() const { return h_declared_; }

void LseOracle::declare_constants(double h_f, double m_f) {
  if (!(h_f > 0.0) || !(m_f > 0.0)) {
    throw InvalidProblemError("declared constants must be positive");
  }
  h_declared_ = h_f;
  m_declared_ = m_f;
}

void LseOracle::restrict_domain_above(const Eigen::VectorXd& lower) {
  if (lower.size() != a_.cols()) {
    throw DimensionError("domain restriction has wrong dimension");
  }
  lower_ = lower;
}

bool LseOracle::in_domain(const Eigen::VectorXd& x) const {
  if (x.size() != a_.cols()) {
    return false;
  }
  if (lower_.size() != 0 && !(x.array() > lower_.array()).all()) {
    return false;
  }
  return true;
}

ScOracle::Eval LseOracle::eval(const Eigen::VectorXd& x) const {
  Eval e;
  const Eigen::VectorXd z = (a_ * x + offsets_) / mu_;
  const double zmax = z.maxCoeff();
  const Eigen::VectorXd w = (z.array() - zmax).exp();
  const double total = w.sum();
  const Eigen::VectorXd p = w / total;
  e.value = mu_ * (zmax + std::log(total)) + 0.5 * sigma_ * x.squaredNorm();
  e.grad = a_.transpose() * p + sigma_ * x;
  const Eigen::MatrixXd pa = p.asDiagonal() * a_;
  e.hess = (a_.transpose() * pa -
            (a_.transpose() * p) * (p.transpose() * a_)) /
               mu_ +
           sigma_ * Eigen::MatrixXd::Identity(dim(), dim());
  return e;
}

double LseOracle::value(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd z = (a_ * x + offsets_) / mu_;
  const double zmax = z.maxCoeff();
  const double total = (z.array() - zmax).exp().sum();
  return mu_ * (zmax + std::log(total)) + 0.5 * sigma_ * x.squaredNorm();
}

Eigen::VectorXd LseOracle::gradient(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd z = (a_ * x + offsets_) / mu_;
  const double zmax = z.maxCoeff();
  const Eigen::VectorXd w = (z.array() - zmax).exp();
  const Eigen::VectorXd p = w / w.sum();
  return a_.transpose() * p + sigma_ * x;
}

Eigen::MatrixXd LseOracle::hessian(const Eigen::VectorXd& x) const {
  return eval(x).hess;
}

std::shared_ptr<ScOracle> make_scalar_xlnx() {
  return std::make_shared<ScalarXlnx>();
}

std::shared_ptr<BarrierOracle> make_box_barrier(int n) {
  return std::make_shared<BoxBarrier>(n);
}

std::shared_ptr<BarrierOracle> make_simplex_barrier(int n) {
  return std::make_shared<SimplexBarrier>(n);
}

std::shared_ptr<LseOracle> make_lse_oracle(Eigen::MatrixXd a,
                                           Eigen::VectorXd offsets, double mu,
                                           double sigma) {
  return std::make_shared<LseOracle>(std::move(a), std::move(offsets), mu,
                                     sigma);
}

std::shared_ptr<LipschitzStrongOracle> make_logistic_oracle(
    Eigen::MatrixXd a, Eigen::VectorXd labels, double sigma) {
  return std::make_shared<LogisticOracle>(std::move(a), std::move(labels),
                                          sigma);
}

LpData make_random_lp(int n, int m, std::uint64_t seed) {
  if (m < 1 || n <= m) {
    throw InvalidProblemError("random LP needs n > m >= 1");
  }
  for (int attempt = 0; attempt < 64; ++attempt) {
    Rng rng(seed + 7919ULL * static_cast<std::uint64_t>(attempt));
    LpData lp;
    lp.a = Eigen::MatrixXd(m, n);
    lp.a.row(0).setOnes();  // keeps the feasible set bounded
    for (int i = 1; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        lp.a(i, j) = rng.gaussian();
      }
    }
    lp.interior = Eigen::VectorXd(n);
    for (int j = 0; j < n; ++j) {
      lp.interior[j] = 0.5 + rng.uniform();
    }
    lp.b = lp.a * lp.interior;
    lp.c = Eigen::VectorXd(n);
    for (int j = 0; j < n; ++j) {
      lp.c[j] = rng.gaussian();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(lp.a.transpose());
    if (qr.rank() != m) {
      continue;
    }
    solve_lp_by_enumeration(lp);
    if (lp.optimal_vertex.size() == n) {
      return lp;
    }
  }
  throw InvalidProblemError("random LP generation failed repeatedly");
}

void solve_lp_by_enumeration(LpData& lp) {
  const int n = static_cast<int>(lp.a.cols());
  const int m = static_cast<int>(lp.a.rows());
  lp.optimal_vertex.resize(0);
  lp.optimal_dual.resize(0);
  double best = std::numeric_limits<double>::infinity();

  std::vector<int> combo(m);
  std::iota(combo.begin(), combo.end(), 0);
  std::vector<std::vector<int>> optimal_bases;
  while (true) {
    Eigen::MatrixXd basis(m, m);
    for (int k = 0; k < m; ++k) {
      basis.col(k) = lp.a.col(combo[k]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (lu.isInvertible()) {
      const Eigen::VectorXd xb = lu.solve(lp.b);
      if (xb.minCoeff() >= -1e-9) {
        double v = 0.0;
        for (int k = 0; k < m; ++k) {
          v += lp.c[combo[k]] * xb[k];
        }
        const double margin = 1e-9 * (1.0 + std::abs(v));
        if (!std::isfinite(best) || v < best - margin) {
          best = v;
          optimal_bases.clear();
          lp.optimal_vertex = Eigen::VectorXd::Zero(n);
          for (int k = 0; k < m; ++k) {
            lp.optimal_vertex[combo[k]] = std::max(0.0, xb[k]);
          }
        }
        if (v <= best + margin) {
          optimal_bases.push_back(combo);
        }
      }
    }
    int i = m - 1;
    while (i >= 0 && combo[i] == n - m + i) {
      --i;
    }
    if (i < 0) {
      break;
    }
    ++combo[i];
    for (int j = i + 1; j < m; ++j) {
      combo[j] = combo[j - 1] + 1;
    }
  }
  if (!std::isfinite(best)) {
    return;  // infeasible; caller decides
  }
  lp.optimal_value = best;
  // Rebuild the argmin vertex for the recorded best value, then look for a
  // basis whose multiplier prices out every column.
  for (const std::vector<int>& cand : optimal_bases) {
    Eigen::MatrixXd basis(m, m);
    Eigen::VectorXd cb(m);
    for (int k = 0; k < m; ++k) {
      basis.col(k) = lp.a.col(cand[k]);
      cb[k] = lp.c[cand[k]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    const Eigen::VectorXd xb = lu.solve(lp.b);
    double v = 0.0;
    for (int k = 0; k < m; ++k) {
      v += lp.c[cand[k]] * xb[k];
    }
    if (v <= best + 1e-9 * (1.0 + std::abs(best))) {
      lp.optimal_vertex = Eigen::VectorXd::Zero(n);
      for (int k = 0; k < m; ++k) {
        lp.optimal_vertex[cand[k]] = std::max(0.0, xb[k]);
      }
      const Eigen::VectorXd y =
          Eigen::FullPivLU<Eigen::MatrixXd>(basis.transpose()).solve(cb);
      const Eigen::VectorXd reduced = lp.c - lp.a.transpose() * y;
      if (reduced.minCoeff() >= -1e-8) {
        lp.optimal_dual = y;
        break;
      }
    }
  }
}

namespace {

// f'' and f''' of the 1-D lse family from softmax moments of the slopes.
void valley_curvatures(const Eigen::VectorXd& slopes,
                       const Eigen::VectorXd& offsets, double mu, double ridge,
                       double u, double* second, double* third) {
  Eigen::VectorXd z = (slopes * u + offsets) / mu;
  const double zmax = z.maxCoeff();
  const Eigen::VectorXd w = (z.array() - zmax).exp();
  const Eigen::VectorXd p = w / w.sum();
  const double mean = p.dot(slopes);
  const Eigen::ArrayXd centered = slopes.array() - mean;
  const double var = (p.array() * centered.square()).sum();
  const double m3 = (p.array() * centered.cube()).sum();
  *second = var / mu + ridge;
  *third = m3 / (mu * mu);
}

}  // namespace

ProblemInstance make_lse_valley(int decades, double nu) {
  if (decades < 1 || decades > 60) {
    throw InvalidProblemError("valley depth must be between 1 and 60 decades");
  }
  if (!(nu > 0.0)) {
    throw InvalidProblemError("valley weight must be positive");
  }
  const double u0 = std::pow(10.0, -decades);
  const double u_dom = u0 / 10.0;
  const double v_min = u_dom / 2.0;
  const double v_max = 3.0;
  const double ratio = 1.15;

  std::vector<double> tangency;
  for (double v = v_min; v < v_max * ratio; v *= ratio) {
    tangency.push_back(v);
  }
  const int m = static_cast<int>(tangency.size());
  Eigen::MatrixXd a(m, 1);
  Eigen::VectorXd offsets(m);
  for (int j = 0; j < m; ++j) {
    a(j, 0) = -nu / tangency[j];
    offsets[j] = nu * (1.0 - std::log(tangency[j]));
  }
  const double mu = 0.05 * nu;
  const double ridge = nu;
  auto oracle = make_lse_oracle(a, offsets, mu, ridge);
  Eigen::VectorXd lower(1);
  lower[0] = u_dom;
  oracle->restrict_domain_above(lower);

  // Measured constants: dense log-spaced scan of the curvature ratio and the
  // third derivative over the closure of the domain up to far past the
  // minimizer, with a safety factor for grid error.
  const Eigen::VectorXd slopes = a.col(0);
  const double scan_hi = 50.0;
  const int per_decade = 80;
  const double decades_total = std::log10(scan_hi / u_dom);
  const int points = static_cast<int>(decades_total * per_decade) + 2;
  double max_ratio_seen = 0.0;
  double max_third = 0.0;
  for (int i = 0; i < points; ++i) {
    const double u =
        u_dom * std::pow(10.0, decades_total * i / (points - 1.0));
    double second = 0.0;
    double third = 0.0;
    valley_curvatures(slopes, offsets, mu, ridge, u, &second, &third);
    max_third = std::max(max_third, std::abs(third));
    max_ratio_seen = std::max(
        max_ratio_seen, std::abs(third) / (2.0 * std::pow(second, 1.5)));
  }
  oracle->declare_constants(1.15 * max_third, 1.15 * max_ratio_seen);

  ProblemInstance instance;
  instance.name = "lse-valley";
  instance.oracle = oracle;
  instance.strong = oracle;
  instance.x0 = Eigen::VectorXd::Constant(1, u0);

  Eigen::VectorXd start = Eigen::VectorXd::Constant(1, 1.0);
  const Eigen::VectorXd x_star = solve_gradient_equation(
      *oracle, Eigen::VectorXd::Zero(1), start, 1e-13, 200);
  instance.x_star = x_star;
  instance.f_star = oracle->value(x_star);
  return instance;
}

ProblemInstance zoo(const std::string& name, const ZooParams& params) {
  ProblemInstance instance;
  instance.name = name;
  if (name == "scalar-xlnx") {
    instance.oracle = make_scalar_xlnx();
    instance.x0 = Eigen::VectorXd::Constant(1, 2.0 * params.x0_scale);
    instance.f_star = 1.0;
    instance.x_star = Eigen::VectorXd::Constant(1, 1.0);
    return instance;
  }
  if (name == "box-barrier") {
    auto barrier = make_box_barrier(params.n);
    instance.oracle = barrier;
    instance.barrier = barrier;
    instance.x0 = Eigen::VectorXd::Constant(
        params.n, std::min(0.9, 0.5 * params.x0_scale));
    instance.f_star = 0.0;
    instance.x_star = barrier->analytic_center();
    return instance;
  }
  if (name == "simplex-entropy") {
    auto barrier = make_simplex_barrier(params.n);
    instance.oracle = barrier;
    instance.barrier = barrier;
    instance.x0 = barrier->analytic_center() * 0.5;
    instance.f_star = (params.n + 1.0) * std::log(params.n + 1.0);
    instance.x_star = barrier->analytic_center();
    return instance;
  }
  if (name == "lse") {
    Rng rng(params.seed);
    Eigen::MatrixXd a(params.m, params.n);
    for (int i = 0; i < params.m; ++i) {
      for (int j = 0; j < params.n; ++j) {
        a(i, j) = rng.gaussian();
      }
    }
    auto oracle = make_lse_oracle(a, Eigen::VectorXd(), params.mu,
                                  params.sigma);
    instance.oracle = oracle;
    instance.strong = oracle;
    instance.x0 = Eigen::VectorXd::Constant(
        params.n, params.x0_scale / std::sqrt(double(params.n)));
    if (params.with_reference) {
      const Eigen::VectorXd x_star = solve_gradient_equation(
          *oracle, Eigen::VectorXd::Zero(params.n),
          Eigen::VectorXd::Zero(params.n), 1e-12, 200000);
      instance.x_star = x_star;
      instance.f_star = oracle->value(x_star);
    }
    return instance;
  }
  if (name == "lse-valley") {
    return make_lse_valley(params.decades, params.nu);
  }
  if (name == "logistic") {
    Rng rng(params.seed);
    Eigen::MatrixXd a(params.m, params.n);
    Eigen::VectorXd labels(params.m);
    for (int i = 0; i < params.m; ++i) {
      for (int j = 0; j < params.n; ++j) {
        a(i, j) = rng.gaussian();
      }
      labels[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    }
    auto oracle = make_logistic_oracle(a, labels, params.sigma);
    instance.oracle = oracle;
    instance.strong = oracle;
    instance.x0 = Eigen::VectorXd::Constant(
        params.n, params.x0_scale / std::sqrt(double(params.n)));
    if (params.with_reference) {
      const Eigen::VectorXd x_star = solve_gradient_equation(
          *oracle, Eigen::VectorXd::Zero(params.n),
          Eigen::VectorXd::Zero(params.n), 1e-12, 200000);
      instance.x_star = x_star;
      instance.f_star = oracle->value(x_star);
    }
    return instance;
  }
  if (name == "lp-random") {
    instance.lp = make_random_lp(params.n, params.m, params.seed);
    instance.x0 = instance.lp->interior;
    instance.f_star = instance.lp->optimal_value;
    instance.x_star = instance.lp->optimal_vertex;
    return instance;
  }
  throw InvalidProblemError("unknown zoo instance: " + name);
}

}  // namespace scopt
