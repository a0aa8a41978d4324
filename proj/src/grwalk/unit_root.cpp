#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "grwalk/estimators.hpp"

namespace grwalk {
namespace {

// MacKinnon (1994) response-surface approximation for the single-series
// Dickey-Fuller tau distribution: p = Phi(poly(tau)), with separate
// polynomials left and right of tau_star and hard limits outside
// [tau_min, tau_max].
struct TauSurface {
  double tau_min, tau_star, tau_max;
  double small_p[3];
  double large_p[4];
};

constexpr TauSurface kSurfaceNone{-19.04, -1.04, std::numeric_limits<double>::infinity(),
                                  {0.6344, 1.2378, 3.2496e-2},
                                  {0.4797, 0.93557, -0.06999, 3.3066e-2}};
constexpr TauSurface kSurfaceConstant{-18.83, -1.61, 2.74,
                                      {2.1659, 1.4412, 3.8269e-2},
                                      {1.7339, 0.93202, -0.12745, -1.0368e-2}};
constexpr TauSurface kSurfaceTrend{-16.18, -2.89, 0.7,
                                   {3.2512, 1.6047, 4.9588e-2},
                                   {2.5261, 0.61654, -0.37956, -6.0285e-2}};

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct OlsFit {
  Eigen::VectorXd beta;
  double s2 = 0.0;         // residual variance with df correction
  double se_target = 0.0;  // standard error of the coefficient of interest
};

// Least squares over rows produced by fill(row_index, x_row, y_value). Rows are
// assembled in chunks so long series never materialise the full design matrix.
template <class RowFn>
OlsFit ols(Eigen::Index rows, Eigen::Index k, Eigen::Index target, RowFn&& fill) {
  if (rows <= k) throw ValidationError("unit root regression has no residual degrees of freedom");
  constexpr Eigen::Index kChunk = 4096;
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd X(std::min(kChunk, rows), k);
  Eigen::VectorXd y(std::min(kChunk, rows));
  auto for_chunks = [&](auto&& consume) {
    for (Eigen::Index begin = 0; begin < rows; begin += kChunk) {
      const Eigen::Index len = std::min(kChunk, rows - begin);
      for (Eigen::Index r = 0; r < len; ++r) {
        auto row = X.row(r);
        fill(begin + r, row, y(r));
      }
      consume(X.topRows(len), y.head(len));
    }
  };
  for_chunks([&](const auto& Xc, const auto& yc) {
    xtx.selfadjointView<Eigen::Lower>().rankUpdate(Xc.transpose());
    xty.noalias() += Xc.transpose() * yc;
  });
  xtx = xtx.selfadjointView<Eigen::Lower>();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xtx);
  qr.setThreshold(1e-12);
  if (qr.rank() < k) throw ValidationError("unit root regression is singular (degenerate input)");
  OlsFit fit;
  fit.beta = qr.solve(xty);
  double rss = 0.0;
  for_chunks([&](const auto& Xc, const auto& yc) { rss += (yc - Xc * fit.beta).squaredNorm(); });
  fit.s2 = rss / static_cast<double>(rows - k);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(k);
  unit(target) = 1.0;
  const Eigen::VectorXd col = qr.solve(unit);
  fit.se_target = std::sqrt(fit.s2 * col(target));
  if (!std::isfinite(fit.se_target) || !(fit.se_target > 0.0))
    throw ValidationError("unit root regression is degenerate");
  return fit;
}

Eigen::Index deterministic_columns(Deterministic det) {
  switch (det) {
    case Deterministic::None: return 0;
    case Deterministic::Constant: return 1;
    case Deterministic::Trend: return 2;
  }
  return 0;
}

template <class Row>
void fill_deterministic(Row& row, double t, Deterministic det) {
  if (det == Deterministic::Constant || det == Deterministic::Trend) row(0) = 1.0;
  if (det == Deterministic::Trend) row(1) = t;
}

std::size_t auto_lags(std::size_t n) {
  return std::min(schwert_lags(n), (n - 1) / 4);
}

}  // namespace

std::size_t schwert_lags(std::size_t n) {
  return static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

double dickey_fuller_p_value(double tau, Deterministic det) {
  const TauSurface& s = det == Deterministic::None       ? kSurfaceNone
                        : det == Deterministic::Constant ? kSurfaceConstant
                                                         : kSurfaceTrend;
  if (std::isnan(tau)) return 1.0;
  if (tau > s.tau_max) return 1.0;
  if (tau < s.tau_min) return 0.0;
  double z = 0.0;
  if (tau <= s.tau_star) {
    z = s.small_p[0] + tau * (s.small_p[1] + tau * s.small_p[2]);
  } else {
    z = s.large_p[0] + tau * (s.large_p[1] + tau * (s.large_p[2] + tau * s.large_p[3]));
  }
  return std::clamp(normal_cdf(z), 0.0, 1.0);
}

UnitRootResult adf_test(std::span<const double> x, std::optional<std::size_t> max_lags,
                        Deterministic det) {
  const std::size_t n = x.size();
  if (n < 20) throw ValidationError("adf_test: need at least 20 observations");
  const std::size_t p = max_lags.value_or(auto_lags(n));
  if (p + 2 >= n) throw ValidationError("adf_test: too many lags for the series length");

  const Eigen::Index d = deterministic_columns(det);
  const auto rows = static_cast<Eigen::Index>(n - 1 - p);
  const Eigen::Index k = d + 1 + static_cast<Eigen::Index>(p);
  const OlsFit fit = ols(rows, k, d, [&](Eigen::Index r, auto& row, double& y) {
    const std::size_t t = static_cast<std::size_t>(r) + p + 1;
    y = x[t] - x[t - 1];
    fill_deterministic(row, static_cast<double>(t), det);
    row(d) = x[t - 1];
    for (std::size_t i = 1; i <= p; ++i)
      row(d + static_cast<Eigen::Index>(i)) = x[t - i] - x[t - i - 1];
  });
  UnitRootResult res;
  res.test = UnitRootTest::ADF;
  res.statistic = fit.beta(d) / fit.se_target;
  res.p_value = dickey_fuller_p_value(res.statistic, det);
  res.lags = p;
  res.root = 1.0 + fit.beta(d);
  res.n_obs = static_cast<std::size_t>(rows);
  return res;
}

UnitRootResult pp_test(std::span<const double> x, std::optional<std::size_t> bandwidth,
                       Deterministic det) {
  const std::size_t n = x.size();
  if (n < 20) throw ValidationError("pp_test: need at least 20 observations");
  const std::size_t lags = bandwidth.value_or(auto_lags(n));
  const Eigen::Index d = deterministic_columns(det);
  const auto rows = static_cast<Eigen::Index>(n - 1);
  if (static_cast<std::size_t>(rows) <= lags)
    throw ValidationError("pp_test: bandwidth too large for the series length");
  auto fill = [&](Eigen::Index r, auto& row, double& y) {
    const std::size_t t = static_cast<std::size_t>(r) + 1;
    y = x[t];
    fill_deterministic(row, static_cast<double>(t), det);
    row(d) = x[t - 1];
  };
  const OlsFit fit = ols(rows, d + 1, d, fill);
  std::vector<double> u(static_cast<std::size_t>(rows));
  {
    Eigen::RowVectorXd row(d + 1);
    for (Eigen::Index r = 0; r < rows; ++r) {
      double y = 0.0;
      fill(r, row, y);
      u[static_cast<std::size_t>(r)] = y - row.dot(fit.beta);
    }
  }
  const double T = static_cast<double>(rows);
  auto autocov = [&](std::size_t j) {
    double acc = 0.0;
    for (std::size_t t = j; t < u.size(); ++t) acc += u[t] * u[t - j];
    return acc / T;
  };
  const double gamma0 = autocov(0);
  double lambda2 = gamma0;
  for (std::size_t j = 1; j <= lags; ++j)
    lambda2 += 2.0 * (1.0 - static_cast<double>(j) / static_cast<double>(lags + 1)) * autocov(j);
  if (!(lambda2 > 0.0) || !(gamma0 > 0.0))
    throw ValidationError("pp_test: degenerate long-run variance");

  const double t_rho = (fit.beta(d) - 1.0) / fit.se_target;
  const double lambda = std::sqrt(lambda2);
  UnitRootResult res;
  res.test = UnitRootTest::PhillipsPerron;
  res.statistic = std::sqrt(gamma0 / lambda2) * t_rho -
                  0.5 * (lambda2 - gamma0) / lambda * (T * fit.se_target / std::sqrt(fit.s2));
  res.p_value = dickey_fuller_p_value(res.statistic, det);
  res.lags = lags;
  res.root = fit.beta(d);
  res.n_obs = static_cast<std::size_t>(rows);
  return res;
}

std::string to_string(UnitRootTest test) {
  return test == UnitRootTest::ADF ? "adf" : "pp";
}

std::string to_string(Deterministic det) {
  switch (det) {
    case Deterministic::None: return "none";
    case Deterministic::Constant: return "constant";
    case Deterministic::Trend: return "trend";
  }
  return "unknown";
}

Deterministic parse_deterministic(std::string_view text) {
  if (text == "none") return Deterministic::None;
  if (text == "constant" || text == "drift") return Deterministic::Constant;
  if (text == "trend") return Deterministic::Trend;
  throw ValidationError("unknown deterministic terms '" + std::string(text) +
                        "' (expected none, constant or trend)");
}

}  // namespace grwalk
