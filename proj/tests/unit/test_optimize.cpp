#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "xload/error.hpp"
#include "xload/optimize.hpp"
#include "xload/random.hpp"

using namespace xload;
using Catch::Approx;

TEST_CASE("bfgs minimizes the Rosenbrock function", "[optimize]") {
  const ObjectiveFn f = [](const Eigen::VectorXd& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const GradientFn g = [](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out.resize(2);
    out[0] = -400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]);
    out[1] = 200.0 * (x[1] - x[0] * x[0]);
  };
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const MinimizeResult r = minimize_bfgs(f, g, x0, Box::unbounded(2));
  CHECK(r.converged);
  CHECK(r.x[0] == Approx(1.0).margin(1e-6));
  CHECK(r.x[1] == Approx(1.0).margin(1e-6));

  const MinimizeResult numeric = minimize_bfgs(f, nullptr, x0, Box::unbounded(2));
  CHECK(numeric.x[0] == Approx(1.0).margin(1e-4));
}

TEST_CASE("bfgs respects box constraints", "[optimize]") {
  const ObjectiveFn f = [](const Eigen::VectorXd& x) {
    return std::pow(x[0] - 3.0, 2) + std::pow(x[1] + 1.0, 2);
  };
  Box box = Box::unbounded(2);
  box.upper[0] = 0.5;
  const MinimizeResult r = minimize_bfgs(f, nullptr, Eigen::VectorXd::Zero(2), box);
  CHECK(r.converged);
  CHECK(r.x[0] == Approx(0.5));
  CHECK(r.x[1] == Approx(-1.0).margin(1e-6));
}

TEST_CASE("finite-difference Hessians of a quadratic", "[optimize]") {
  Eigen::MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 3, -1, 0, -1, 2;
  const ObjectiveFn f = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x); };
  const GradientFn g = [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) { out = a * x; };
  Eigen::VectorXd x(3);
  x << 0.3, -2.0, 1.0;
  CHECK((hessian_from_gradient(g, x) - a).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((hessian_from_values(f, x) - a).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((numeric_gradient(f, x) - a * x).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("invert_negative_hessian floors eigenvalues", "[optimize]") {
  Eigen::MatrixXd h(2, 2);
  h << 2.0, 0.0, 0.0, 4.0;
  CovarianceResult c = invert_negative_hessian(h);
  CHECK_FALSE(c.repaired);
  CHECK(c.covariance(0, 0) == Approx(0.5));
  CHECK(c.covariance(1, 1) == Approx(0.25));
  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  c = invert_negative_hessian(singular);
  CHECK(c.repaired);
  CHECK(c.covariance.allFinite());
  Eigen::MatrixXd bad = h;
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(invert_negative_hessian(bad), NumericError);
}

TEST_CASE("multivariate normal draws", "[optimize]") {
  Eigen::VectorXd mean(2);
  mean << 1.0, -1.0;
  Rng rng(1);
  CHECK(draw_multivariate_normal(mean, Eigen::MatrixXd::Zero(2, 2), rng) == mean);

  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 0.6, 0.6, 2.0;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(2, 2);
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd d = draw_multivariate_normal(mean, cov, rng) - mean;
    sum += d;
    outer += d * d.transpose();
  }
  CHECK((sum / n).cwiseAbs().maxCoeff() < 0.02);
  CHECK(((outer / n) - cov).cwiseAbs().maxCoeff() < 0.03);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(draw_multivariate_normal(mean, indefinite, rng), NumericError);
}
