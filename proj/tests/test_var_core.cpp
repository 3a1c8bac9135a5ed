#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "missvar/var_core.hpp"
#include "test_support.hpp"

using namespace missvar;
using namespace missvar::test;

TEST_CASE("generate: diagonal pattern is rho * I") {
  const auto B = generate_sparse_transition(Pattern::diagonal, 2, 2, 0.5, 1);
  CHECK((B.entries - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(B.nnz == 2);
  CHECK_FALSE(B.rho_is_entry_magnitude);
}

TEST_CASE("generate: chain pattern is nilpotent with sub-diagonal support") {
  const auto B = generate_sparse_transition(Pattern::chain, 5, 4, 0.8, 3);
  CHECK(B.nnz == 4);
  CHECK(B.rho_is_entry_magnitude);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      if (i == j + 1)
        CHECK(B.entries(i, j) == doctest::Approx(0.8));
      else
        CHECK(B.entries(i, j) == 0.0);
    }
  CHECK(spectral_radius_oracle(B.entries) < 1e-12);
}

TEST_CASE("generate: star patterns have one nonzero column / row") {
  const auto in = generate_sparse_transition(Pattern::in_star, 6, 5, 0.4, 0);
  CHECK(in.nnz == 5);
  CHECK(in.entries.rightCols(5).cwiseAbs().maxCoeff() == 0.0);
  CHECK(in.rho_is_entry_magnitude);

  const auto out = generate_sparse_transition(Pattern::out_star, 6, 5, 0.4, 0);
  CHECK(out.nnz == 5);
  CHECK(out.entries.bottomRows(5).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generate: random_sparse hits the target spectral radius") {
  const auto B =
      generate_sparse_transition(Pattern::random_sparse, 20, 40, 0.7, 7);
  CHECK(B.nnz == 40);
  CHECK_FALSE(B.rho_is_entry_magnitude);
  CHECK(spectral_radius_oracle(B.entries) == doctest::Approx(0.7).epsilon(1e-8));
}

TEST_CASE("generate: random_sparse across seeds keeps nnz and rho") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto B =
        generate_sparse_transition(Pattern::random_sparse, 12, 9, 0.6, seed);
    CHECK(B.nnz == 9);
    if (!B.rho_is_entry_magnitude)
      CHECK(spectral_radius_oracle(B.entries) ==
            doctest::Approx(0.6).epsilon(1e-8));
  }
}

TEST_CASE("generate: infeasible combinations are rejected") {
  CHECK_THROWS_AS(generate_sparse_transition(Pattern::diagonal, 3, 2, 0.5, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_sparse_transition(Pattern::chain, 5, 3, 0.5, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      generate_sparse_transition(Pattern::random_sparse, 3, 10, 0.5, 0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      generate_sparse_transition(Pattern::random_sparse, 3, 0, 0.5, 0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      generate_sparse_transition(Pattern::random_sparse, 3, 2, 1.5, 0),
      std::invalid_argument);
}

TEST_CASE("spectral_radius: shear matrix from the stability discussion") {
  const double a = 0.5;
  Matrix B(2, 2);
  B << a, 1.0 / a, 0.0, a;
  CHECK(spectral_radius(B) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("spectral_radius: trivial cases") {
  CHECK(spectral_radius(Matrix::Zero(3, 3)) == 0.0);
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 0.3;
  D(1, 1) = 0.7;
  CHECK(spectral_radius(D) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("spectral_radius: non-finite entries rejected") {
  Matrix B = Matrix::Zero(2, 2);
  B(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(spectral_radius(B), std::invalid_argument);
}

TEST_CASE("stationary_covariance: closed forms") {
  CHECK((stationary_covariance(Matrix::Zero(3, 3), Matrix::Identity(3, 3)) -
         Matrix::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  // geometric series: sum c^{2t} = 1/(1 - c^2) = 4/3 at c = 0.5
  const Matrix B = 0.5 * Matrix::Identity(2, 2);
  const Matrix gamma = stationary_covariance(B, Matrix::Identity(2, 2));
  CHECK((gamma - (4.0 / 3.0) * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("stationary_covariance: residual and series oracle, random stable B") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto B = generate_sparse_transition(Pattern::random_sparse, 5, 8, 0.6,
                                              100 + trial);
    Matrix sigma = random_gaussian(5, 5, rng);
    sigma = sigma * sigma.transpose() + Matrix::Identity(5, 5);

    const Matrix gamma = stationary_covariance(B.entries, sigma);
    const Matrix residual =
        gamma - B.entries * gamma * B.entries.transpose() - sigma;
    CHECK(residual.cwiseAbs().maxCoeff() <=
          1e-10 * gamma.cwiseAbs().maxCoeff());

    const Matrix oracle = stationary_covariance_series(B.entries, sigma);
    CHECK((gamma - oracle).cwiseAbs().maxCoeff() <=
          1e-9 * oracle.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("stationary_covariance: unstable B rejected") {
  CHECK_THROWS_AS(
      stationary_covariance(1.1 * Matrix::Identity(2, 2), Matrix::Identity(2, 2)),
      std::invalid_argument);
}

TEST_CASE("autocovariance: h = 0 and the lag-1 closed form") {
  const Matrix B = 0.5 * Matrix::Identity(2, 2);
  const Matrix I = Matrix::Identity(2, 2);
  CHECK((autocovariance(B, I, 0) - stationary_covariance(B, I))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((autocovariance(B, I, 1) - (2.0 / 3.0) * I).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("autocovariance: population identity B Gamma(0) = Gamma(1)'") {
  for (int trial = 0; trial < 8; ++trial) {
    const auto B = generate_sparse_transition(Pattern::random_sparse, 6, 10,
                                              0.7, 200 + trial);
    const Matrix I = Matrix::Identity(6, 6);
    const Matrix g0 = autocovariance(B.entries, I, 0);
    const Matrix g1 = autocovariance(B.entries, I, 1);
    CHECK((B.entries * g0 - g1.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("innovation spec: defaults and validation") {
  const Matrix sigma = 2.0 * Matrix::Identity(3, 3);
  const auto g = InnovationSpec::make(InnovationFamily::gaussian, sigma);
  CHECK(g.c_eps == doctest::Approx(std::sqrt(4.0)));
  const auto u = InnovationSpec::make(InnovationFamily::bounded_uniform, sigma);
  CHECK(u.c_eps == doctest::Approx(2.0 * std::sqrt(3.0) * std::sqrt(2.0)));
  const auto r =
      InnovationSpec::make(InnovationFamily::rademacher_scaled, sigma);
  CHECK(r.c_eps == doctest::Approx(2.0 * std::sqrt(2.0)));
  for (const auto& spec : {g, u, r})
    CHECK(2.0 * spec.c_eps * spec.c_eps >= 2.0);

  CHECK_THROWS_AS(
      InnovationSpec::make(InnovationFamily::gaussian, -Matrix::Identity(2, 2)),
      std::invalid_argument);
  Matrix asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(InnovationSpec::make(InnovationFamily::gaussian, asym),
                  std::invalid_argument);
}

TEST_CASE("simulate: determinism and exact recursion replay") {
  const auto B =
      generate_sparse_transition(Pattern::random_sparse, 6, 8, 0.5, 5);
  const auto spec =
      InnovationSpec::make(InnovationFamily::gaussian, Matrix::Identity(6, 6));
  const auto t1 = simulate(B, spec, 200, 42);
  const auto t2 = simulate(B, spec, 200, 42);
  CHECK((t1.W - t2.W).cwiseAbs().maxCoeff() == 0.0);

  CHECK(t1.W.col(0).cwiseAbs().maxCoeff() == 0.0);
  for (int t = 0; t < t1.n; ++t) {
    const Vector expect = B.entries * t1.W.col(t) + t1.innovations.col(t);
    CHECK((t1.W.col(t + 1) - expect).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("simulate: B = 0 returns pure innovations with covariance -> I") {
  TransitionMatrix zero;
  zero.entries = Matrix::Zero(4, 4);
  zero.p = 4;
  zero.nnz = 0;
  const auto spec =
      InnovationSpec::make(InnovationFamily::gaussian, Matrix::Identity(4, 4));
  const int n = 20000;
  const auto traj = simulate(zero, spec, n, 7);
  CHECK((traj.W.rightCols(n) - traj.innovations).cwiseAbs().maxCoeff() == 0.0);
  const Matrix cov = traj.innovations * traj.innovations.transpose() / n;
  CHECK((cov - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("simulate: lag-0 sample covariance matches 4/3 I within 5 SE") {
  const int n = 100000;
  TransitionMatrix B;
  B.entries = 0.5 * Matrix::Identity(2, 2);
  B.p = 2;
  B.nnz = 2;
  const auto spec =
      InnovationSpec::make(InnovationFamily::gaussian, Matrix::Identity(2, 2));
  const auto traj = simulate(B, spec, n, 12345);
  const Matrix X = traj.W.leftCols(n);
  const Matrix cov = X * X.transpose() / n;

  // batch SE of the (0,0) diagonal entry estimate
  constexpr int kBatches = 20;
  std::vector<double> diag_samples(n);
  for (int t = 0; t < n; ++t) diag_samples[t] = X(0, t) * X(0, t);
  const double se = batch_standard_error(diag_samples, kBatches);
  CHECK(std::abs(cov(0, 0) - 4.0 / 3.0) < 5.0 * se);
  CHECK(std::abs(cov(1, 1) - 4.0 / 3.0) < 5.0 * se);
  CHECK(std::abs(cov(0, 1)) < 5.0 * se);
}

TEST_CASE("simulate: innovation moments converge at the root-n rate") {
  TransitionMatrix B;
  B.entries = Matrix::Zero(4, 4);
  B.p = 4;
  B.nnz = 0;
  const Matrix sigma = Matrix::Identity(4, 4);
  for (auto family : {InnovationFamily::gaussian, InnovationFamily::bounded_uniform,
                      InnovationFamily::rademacher_scaled}) {
    const auto spec = InnovationSpec::make(family, sigma);
    std::vector<double> ratios;
    for (std::uint64_t seed = 0; seed < 9; ++seed) {
      auto deviation = [&](int n) {
        const auto traj = simulate(B, spec, n, 1000 + seed);
        const Matrix& E = traj.innovations;
        const Matrix cov_err = E * E.transpose() / n - sigma;
        const Vector mean_err = E.rowwise().mean();
        return cov_err.norm() + mean_err.norm();
      };
      ratios.push_back(deviation(1000) / deviation(4000));
    }
    const double med = median(ratios);
    CHECK(med > 1.4);
    CHECK(med < 2.9);
  }
}

TEST_CASE("simulate: bounded families stay within their support") {
  TransitionMatrix B;
  B.entries = Matrix::Zero(3, 3);
  B.p = 3;
  B.nnz = 0;
  const Matrix sigma = Matrix::Identity(3, 3);
  const auto u =
      InnovationSpec::make(InnovationFamily::bounded_uniform, sigma);
  const auto traj_u = simulate(B, u, 5000, 3);
  CHECK(traj_u.innovations.cwiseAbs().maxCoeff() <= std::sqrt(3.0) + 1e-12);
  const auto r =
      InnovationSpec::make(InnovationFamily::rademacher_scaled, sigma);
  const auto traj_r = simulate(B, r, 5000, 3);
  CHECK(traj_r.innovations.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("simulate: burn-in shifts the start without breaking the recursion") {
  const auto B =
      generate_sparse_transition(Pattern::random_sparse, 4, 5, 0.6, 9);
  const auto spec =
      InnovationSpec::make(InnovationFamily::gaussian, Matrix::Identity(4, 4));
  const auto traj = simulate(B, spec, 50, 4, /*burn_in=*/100);
  CHECK(traj.W.col(0).cwiseAbs().maxCoeff() > 0.0);
  for (int t = 0; t < traj.n; ++t) {
    const Vector expect = B.entries * traj.W.col(t) + traj.innovations.col(t);
    CHECK((traj.W.col(t + 1) - expect).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("simulate: rejects unstable systems and bad sigma") {
  TransitionMatrix bad;
  bad.entries = 1.2 * Matrix::Identity(2, 2);
  bad.p = 2;
  bad.nnz = 2;
  const auto spec =
      InnovationSpec::make(InnovationFamily::gaussian, Matrix::Identity(2, 2));
  CHECK_THROWS_AS(simulate(bad, spec, 10, 0), std::invalid_argument);
}
