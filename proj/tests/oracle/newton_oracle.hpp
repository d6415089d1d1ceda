#pragma once

// Brute-force Poisson MLE in long double with plain loops: Newton steps on
// the raw design (intercept prepended), Gaussian elimination with partial
// pivoting, no step control beyond halving on a likelihood decrease. Shares
// no code with the library fitter.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Row = std::vector<long double>;

inline long double loglik(const std::vector<Row>& x, const std::vector<long double>& y, const Row& b) {
  long double ll = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double eta = 0;
    for (std::size_t j = 0; j < b.size(); ++j) eta += x[i][j] * b[j];
    ll += y[i] * eta - std::exp(eta);
  }
  return ll;
}

inline Row solve(std::vector<Row> a, Row rhs) {
  const std::size_t p = rhs.size();
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0) throw std::runtime_error("singular system");
    std::swap(a[c], a[piv]);
    std::swap(rhs[c], rhs[piv]);
    for (std::size_t r = c + 1; r < p; ++r) {
      long double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < p; ++k) a[r][k] -= f * a[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  Row out(p);
  for (std::size_t c = p; c-- > 0;) {
    long double s = rhs[c];
    for (std::size_t k = c + 1; k < p; ++k) s -= a[c][k] * out[k];
    out[c] = s / a[c][c];
  }
  return out;
}

// covariates: n rows of k values. Returns (intercept, slopes...).
inline Row newton_mle(const std::vector<std::vector<double>>& covariates, const std::vector<double>& y_in) {
  const std::size_t n = covariates.size();
  const std::size_t p = (n ? covariates[0].size() : 0) + 1;
  std::vector<Row> x(n, Row(p, 1.0L));
  std::vector<long double> y(y_in.begin(), y_in.end());
  long double ybar = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j < p; ++j) x[i][j] = covariates[i][j - 1];
    ybar += y[i];
  }
  ybar /= static_cast<long double>(n);

  Row b(p, 0.0L);
  b[0] = std::log(ybar);
  long double ll = loglik(x, y, b);
  for (int iter = 0; iter < 200; ++iter) {
    Row g(p, 0.0L);
    std::vector<Row> h(p, Row(p, 0.0L));
    for (std::size_t i = 0; i < n; ++i) {
      long double eta = 0;
      for (std::size_t j = 0; j < p; ++j) eta += x[i][j] * b[j];
      long double mu = std::exp(eta);
      for (std::size_t j = 0; j < p; ++j) {
        g[j] += x[i][j] * (y[i] - mu);
        for (std::size_t k = 0; k < p; ++k) h[j][k] += mu * x[i][j] * x[i][k];
      }
    }
    Row step = solve(h, g);
    long double t = 1;
    Row next(p);
    long double ll_next = 0;
    for (int halving = 0; halving < 60; ++halving, t /= 2) {
      for (std::size_t j = 0; j < p; ++j) next[j] = b[j] + t * step[j];
      ll_next = loglik(x, y, next);
      if (ll_next >= ll) break;
    }
    long double size = 0;
    for (std::size_t j = 0; j < p; ++j) size = std::fmax(size, std::fabs(next[j] - b[j]));
    b = next;
    ll = ll_next;
    if (size < 1e-16L) break;
  }
  return b;
}

// --- synthetic data ------------------------------------------------------------

// Knuth's method in chunks of at most 30; deterministic for a given engine.
inline std::int64_t poisson_draw(std::mt19937_64& rng, double lambda) {
  std::int64_t total = 0;
  while (lambda > 0) {
    double chunk = std::fmin(lambda, 30.0);
    lambda -= chunk;
    double limit = std::exp(-chunk);
    double prod = 1;
    std::int64_t k = -1;
    do {
      ++k;
      prod *= static_cast<double>(rng() >> 11) * 0x1.0p-53;
    } while (prod > limit);
    total += k;
  }
  return total;
}

inline double normal_draw(std::mt19937_64& rng) {
  double u1 = 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

struct Panel {
  std::vector<std::vector<double>> x;  // standardized covariates, n x k
  std::vector<double> y;
};

// Covariates drawn N(0,1) then standardized to sample mean 0, SD 1; counts
// Poisson with log mean beta[0] + sum beta[j] x_j.
inline Panel synthetic_panel(std::uint64_t seed, std::size_t n, const std::vector<double>& beta) {
  std::mt19937_64 rng(seed);
  const std::size_t k = beta.size() - 1;
  Panel out;
  out.x.assign(n, std::vector<double>(k));
  for (std::size_t j = 0; j < k; ++j) {
    double mean = 0, ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i][j] = normal_draw(rng);
      mean += out.x[i][j];
    }
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) ss += (out.x[i][j] - mean) * (out.x[i][j] - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    for (std::size_t i = 0; i < n; ++i) out.x[i][j] = (out.x[i][j] - mean) / sd;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double eta = beta[0];
    for (std::size_t j = 0; j < k; ++j) eta += beta[j + 1] * out.x[i][j];
    out.y.push_back(static_cast<double>(poisson_draw(rng, std::exp(eta))));
  }
  return out;
}

}  // namespace oracle
