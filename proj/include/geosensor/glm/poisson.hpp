#pragma once

// Poisson regression with log link, fitted by iteratively reweighted least
// squares on an internally standardized design. Header-only and templated on
// the scalar type; use double or long double.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/QR>

#include "geosensor/error.hpp"

namespace geosensor::glm {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct IrlsOptions {
  int max_iterations = 50;
  double deviance_tolerance = 1e-10;  // |Δdev| / (|dev| + 0.1)
  double score_tolerance = 1e-8;      // max |X'(y - mu)| on the fitting design
};

/// Design with an intercept column followed by the covariates centered and
/// divided by their sample standard deviation (n - 1 denominator).
template <typename Scalar>
struct StandardizedDesign {
  Matrix<Scalar> design;  // n x (k + 1)
  Vector<Scalar> means;   // k
  Vector<Scalar> sds;     // k
};

template <typename Scalar>
struct PoissonFit {
  Vector<Scalar> beta;  // original scale; [0] is the intercept
  Vector<Scalar> se;
  Vector<Scalar> z;
  Vector<Scalar> p;
  Matrix<Scalar> covariance;  // original scale
  Vector<Scalar> standardized_beta;
  Vector<Scalar> sds;         // per covariate
  Vector<Scalar> means;       // per covariate
  Vector<Scalar> pct_change;  // per covariate
  Vector<Scalar> fitted;      // mu
  Scalar loglik = 0;
  Scalar deviance = 0;
  Scalar score_max = 0;  // on the standardized design at the returned estimate
  Eigen::Index n = 0;
  int iterations = 0;
  bool converged = false;
  std::string diagnostic;
};

/// Percentage change in the expected count for a one-SD increase.
template <typename Scalar>
Scalar pct_change(Scalar beta, Scalar sd) {
  using std::expm1;
  if (!(sd > Scalar(0))) throw Error(ErrorKind::InvalidArgument, "pct_change needs a positive standard deviation");
  return Scalar(100) * expm1(beta * sd);
}

template <typename DerivedX, typename DerivedY, typename DerivedB>
auto poisson_loglik(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                    const Eigen::MatrixBase<DerivedB>& coef) {
  using Scalar = typename DerivedX::Scalar;
  using std::exp;
  using std::lgamma;
  Vector<Scalar> eta = x * coef;
  Scalar ll = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) ll += y(i) * eta(i) - exp(eta(i)) - lgamma(y(i) + Scalar(1));
  return ll;
}

// X'(y - exp(X coef)).
template <typename DerivedX, typename DerivedY, typename DerivedB>
auto poisson_score(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                   const Eigen::MatrixBase<DerivedB>& coef) {
  using Scalar = typename DerivedX::Scalar;
  Vector<Scalar> mu = (x * coef).array().exp().matrix();
  return Vector<Scalar>(x.transpose() * (y - mu));
}

// X' diag(mu) X.
template <typename DerivedX, typename DerivedM>
auto poisson_information(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedM>& mu) {
  using Scalar = typename DerivedX::Scalar;
  return Matrix<Scalar>(x.transpose() * mu.asDiagonal() * x);
}

template <typename DerivedY, typename DerivedM>
auto poisson_deviance(const Eigen::MatrixBase<DerivedY>& y, const Eigen::MatrixBase<DerivedM>& mu) {
  using Scalar = typename DerivedY::Scalar;
  using std::log;
  Scalar dev = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    Scalar unit = mu(i) - y(i);
    if (y(i) > Scalar(0)) unit += y(i) * log(y(i) / mu(i));
    dev += std::max(unit, Scalar(0));  // each term is nonnegative; drop rounding noise
  }
  return Scalar(2) * dev;
}

template <typename Derived>
StandardizedDesign<typename Derived::Scalar> standardize(const Eigen::MatrixBase<Derived>& covariates) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  const Eigen::Index n = covariates.rows();
  const Eigen::Index k = covariates.cols();
  StandardizedDesign<Scalar> out;
  out.design.resize(n, k + 1);
  out.means.resize(k);
  out.sds.resize(k);
  out.design.col(0).setOnes();
  for (Eigen::Index j = 0; j < k; ++j) {
    Scalar mean = covariates.col(j).mean();
    Vector<Scalar> centered = covariates.col(j).array() - mean;
    Scalar sd = n > 1 ? sqrt(centered.squaredNorm() / Scalar(n - 1)) : Scalar(0);
    if (!(sd > Scalar(0))) {
      throw Error(ErrorKind::SingularInformation, "covariate column " + std::to_string(j) + " is constant");
    }
    out.means(j) = mean;
    out.sds(j) = sd;
    out.design.col(j + 1) = centered / sd;
  }
  return out;
}

/// Maximum-likelihood Poisson fit of `y` on an intercept plus `covariates`
/// (n x k, no intercept column). Starts from intercept log(mean(y) + 1e-8)
/// with zero slopes and takes Newton (Fisher scoring) steps with step
/// halving. Standard errors come from the inverse Fisher information at the
/// optimum and are mapped back to the covariates' original scale.
///
/// Throws Error with kind AllZeroResponse, Separation (fitted means
/// overflow), SingularInformation (constant or collinear covariates) or
/// InvalidArgument (shape, negative or non-finite input). Hitting the
/// iteration cap returns a fit with converged == false and a diagnostic.
template <typename DerivedX, typename DerivedY>
PoissonFit<typename DerivedX::Scalar> fit_poisson(const Eigen::MatrixBase<DerivedX>& covariates,
                                                  const Eigen::MatrixBase<DerivedY>& response,
                                                  const IrlsOptions& options = {}) {
  using Scalar = typename DerivedX::Scalar;
  using std::abs;
  using std::erfc;
  using std::exp;
  using std::log;
  using std::sqrt;

  const Eigen::Index n = covariates.rows();
  const Eigen::Index k = covariates.cols();
  const Vector<Scalar> y = response;
  if (y.size() != n) throw Error(ErrorKind::InvalidArgument, "response length differs from covariate rows");
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty sample");
  if (n < k + 1) throw Error(ErrorKind::InvalidArgument, "need more observations than covariates");
  if (!covariates.allFinite() || !y.allFinite()) throw Error(ErrorKind::InvalidArgument, "non-finite input");
  if ((y.array() < Scalar(0)).any()) throw Error(ErrorKind::InvalidArgument, "negative count in response");
  if (!(y.sum() > Scalar(0))) {
    throw Error(ErrorKind::AllZeroResponse, "all responses are zero; the intercept MLE diverges to -infinity");
  }

  StandardizedDesign<Scalar> std_design = standardize(covariates);
  const Matrix<Scalar>& x = std_design.design;
  const Eigen::Index p = k + 1;

  if (k > 0) {
    Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(x);
    qr.setThreshold(Scalar(1e-10));
    if (qr.rank() < p) throw Error(ErrorKind::SingularInformation, "collinear covariates");
  }

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar dev_tol = std::max(Scalar(options.deviance_tolerance), Scalar(100) * eps);
  const Scalar score_tol = std::max(Scalar(options.score_tolerance), Scalar(100) * eps * y.sum());
  const Scalar eta_limit = log(std::numeric_limits<Scalar>::max()) - Scalar(1);

  auto means_for = [&](const Vector<Scalar>& coef, Vector<Scalar>& mu) {
    Vector<Scalar> eta = x * coef;
    if ((eta.array() > eta_limit).any()) return false;
    mu = eta.array().exp().matrix();
    return mu.allFinite();
  };

  Vector<Scalar> coef = Vector<Scalar>::Zero(p);
  coef(0) = log(y.mean() + Scalar(1e-8));
  Vector<Scalar> mu;
  if (!means_for(coef, mu)) throw Error(ErrorKind::Separation, "fitted means overflow at the starting point");
  Scalar dev = poisson_deviance(y, mu);
  Vector<Scalar> score = x.transpose() * (y - mu);

  PoissonFit<Scalar> fit;
  fit.n = n;
  int iter = 0;
  bool converged = score.template lpNorm<Eigen::Infinity>() < score_tol;
  while (!converged && iter < options.max_iterations) {
    ++iter;
    Matrix<Scalar> info = poisson_information(x, mu);
    Eigen::LLT<Matrix<Scalar>> llt(info);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::SingularInformation, "Fisher information not positive definite");
    Vector<Scalar> step = llt.solve(score);

    Vector<Scalar> candidate;
    Vector<Scalar> mu_new;
    Scalar dev_new = std::numeric_limits<Scalar>::infinity();
    Scalar scale = 1;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, scale /= Scalar(2)) {
      candidate = coef + scale * step;
      if (means_for(candidate, mu_new)) {
        dev_new = poisson_deviance(y, mu_new);
        if (std::isfinite(static_cast<double>(dev_new)) && dev_new <= dev + dev_tol * (abs(dev) + Scalar(0.1))) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      throw Error(ErrorKind::Separation, "no step reduces the deviance; fitted means overflow or diverge");
    }

    Scalar change = abs(dev_new - dev) / (abs(dev_new) + Scalar(0.1));
    coef = candidate;
    mu = mu_new;
    dev = dev_new;
    score = x.transpose() * (y - mu);
    converged = change < dev_tol || score.template lpNorm<Eigen::Infinity>() < score_tol;
  }

  fit.iterations = iter;
  fit.converged = converged;
  if (!converged) {
    fit.diagnostic = "iteration cap of " + std::to_string(options.max_iterations) +
                     " reached; deviance still changing (possible separation)";
  } else if (mu.minCoeff() < Scalar(1e-6) * y.mean()) {
    // The deviance flattens out while a coefficient runs off to infinity.
    fit.converged = false;
    fit.diagnostic = "a fitted mean collapsed towards zero (separation: some MLE is infinite)";
  }

  Matrix<Scalar> info = poisson_information(x, mu);
  Eigen::LLT<Matrix<Scalar>> llt(info);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::SingularInformation, "Fisher information not positive definite");
  Matrix<Scalar> cov_std = llt.solve(Matrix<Scalar>::Identity(p, p));

  // beta = A * coef maps the standardized coefficients back.
  Matrix<Scalar> a = Matrix<Scalar>::Zero(p, p);
  a(0, 0) = 1;
  for (Eigen::Index j = 0; j < k; ++j) {
    a(0, j + 1) = -std_design.means(j) / std_design.sds(j);
    a(j + 1, j + 1) = Scalar(1) / std_design.sds(j);
  }

  fit.standardized_beta = coef;
  fit.beta = a * coef;
  fit.covariance = a * cov_std * a.transpose();
  fit.se = fit.covariance.diagonal().array().sqrt().matrix();
  fit.z = fit.beta.cwiseQuotient(fit.se);
  fit.p.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) fit.p(j) = erfc(abs(fit.z(j)) / sqrt(Scalar(2)));
  fit.sds = std_design.sds;
  fit.means = std_design.means;
  fit.pct_change.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) fit.pct_change(j) = pct_change(fit.beta(j + 1), fit.sds(j));
  fit.fitted = mu;
  fit.deviance = dev;
  fit.loglik = poisson_loglik(x, y, coef);
  fit.score_max = score.template lpNorm<Eigen::Infinity>();
  return fit;
}

}  // namespace geosensor::glm
