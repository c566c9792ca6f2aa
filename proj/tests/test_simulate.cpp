#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sdae/rng.hpp"
#include "sdae/simulate.hpp"
#include "cutset_fixture.hpp"
#include "support.hpp"

using namespace sdae;

namespace {

GaussianLaw plain_law(Vector mean, Matrix cov) {
  GaussianLaw law;
  law.mean = std::move(mean);
  law.cov = std::move(cov);
  return law;
}

SdaeProblem scalar_problem(double a, double sigma, double u0) {
  Matrix A(1, 1), B(1, 1), Lambda(1, 1);
  A << 1.0;
  B << a;
  Lambda << sigma;
  Vector u0v(1);
  u0v << u0;
  return make_problem({A, B}, Lambda, ForcingSpec::zero(1), u0v,
                      normalized(make_bump(1.0, 0.5, {1.0})));
}

} // namespace

TEST_CASE("wiener pairings are deterministic, order independent, and batch consistent") {
  const auto phi = make_bump(1.0, 0.45, {1.0, 0.2});
  const SimGrid grid{2.0, 3000};

  const Vector v = sample_wiener_vector(phi, 3, 2, grid, 7, 5);
  REQUIRE(v.size() == 6);
  CHECK((sample_wiener_vector(phi, 3, 2, grid, 7, 5) - v).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sample_wiener_vector(phi, 3, 2, grid, 7, 6) - v).cwiseAbs().maxCoeff() > 0.0);
  CHECK((sample_wiener_vector(phi, 3, 2, grid, 8, 5) - v).cwiseAbs().maxCoeff() > 0.0);

  // degenerate sizes pair nothing
  CHECK(sample_wiener_vector(phi, 0, 2, grid, 7, 0).size() == 0);
  CHECK(sample_wiener_vector(phi, 3, 0, grid, 7, 0).size() == 0);

  CutsetFixture fx;
  const auto bump = make_bump(1.0, 0.45, {1.0});
  SolutionSampler sampler(fx.problem, fx.kcf, bump, grid, 2024);
  CHECK(sampler.dimension() == 4);
  CHECK(sampler.noiseDimension() == 3);

  // batches are just the per-index samples laid out in columns
  const Matrix batch = sample_batch(sampler, 5, 17);
  CHECK((batch.col(2) - sampler.sample(19)).cwiseAbs().maxCoeff() == 0.0);
  const Matrix batchY = sample_batch_y(sampler, 3, 4);
  CHECK((batchY.col(0) - sampler.sample_y(4)).cwiseAbs().maxCoeff() == 0.0);
  // the original-variable sample is exactly the Q image of the decomposed one
  CHECK((sampler.sample(19) - fx.kcf.Q * sampler.sample_y(19)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("wiener pairing statistics match the analytic derivative covariance") {
  const auto phi = make_bump(1.0, 0.45, {1.0});
  // the second derivative concentrates near the support edges, so the grid
  // has to be fine enough for the single-node mass guard
  const SimGrid grid{2.0, 3200};
  const int k = 3, m = 1;

  const long count = 4000;
  Matrix samples(k * m, count);
  for (long i = 0; i < count; ++i)
    samples.col(i) = sample_wiener_vector(phi, k, m, grid, 99, i);

  const GaussianLaw law = plain_law(Vector::Zero(k * m), white_noise_deriv_cov(phi, k, m));
  const auto cmp = compare_laws(law, empirical_law(samples), 4.5);
  INFO("max z = ", cmp.maxZ);
  CHECK(cmp.pass);
  // the odd-parity entry has no discretization bias to hide behind
  CHECK(std::abs(empirical_law(samples).cov(0, 1)) < 3e-3);
}

TEST_CASE("simulation rejects bad grids, uncovered supports, and unresolved functions") {
  const auto phi = make_bump(1.0, 0.45, {1.0});

  CHECK(error_code_of([&] { sample_wiener_vector(phi, 2, 1, {2.0, 1}, 0, 0); }) ==
        ErrorCode::GridTooCoarse);
  CHECK(error_code_of([&] { sample_wiener_vector(phi, 2, 1, {0.0, 100}, 0, 0); }) ==
        ErrorCode::GridTooCoarse);
  CHECK(error_code_of([&] { sample_wiener_vector(phi, 2, 1, {-1.0, 100}, 0, 0); }) ==
        ErrorCode::GridTooCoarse);

  // support sticks out past the horizon
  CHECK(error_code_of([&] { sample_wiener_vector(phi, 2, 1, {1.2, 400}, 0, 0); }) ==
        ErrorCode::GridTooCoarse);

  // a spike much narrower than the node spacing concentrates the discrete
  // mass on a single node
  const auto spike = make_bump(0.5, 0.02, {1.0});
  CHECK(error_code_of([&] { sample_wiener_vector(spike, 1, 1, {4.0, 40}, 0, 0); }) ==
        ErrorCode::GridTooCoarse);

  CHECK(error_code_of([&] { sample_wiener_vector(phi, 10, 1, {2.0, 400}, 0, 0); }) ==
        ErrorCode::OrderTooHigh);
  CHECK(error_code_of([&] { sample_wiener_vector(phi, -1, 1, {2.0, 400}, 0, 0); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(error_code_of([&] { sample_wiener_vector(phi, 2, 1, {2.0, 400}, 0, -3); }) ==
        ErrorCode::DimensionMismatch);

  CutsetFixture fx;
  const SimGrid grid{2.0, 2000};
  CHECK(error_code_of([&] {
          SolutionSampler s(scalar_problem(1.0, 1.0, 0.0), fx.kcf, phi, grid, 0);
        }) == ErrorCode::DimensionMismatch);
  // the size-2 nilpotent block needs the first derivative of phi
  CHECK(error_code_of([&] {
          SolutionSampler s(fx.problem, fx.kcf, make_bump(1.0, 0.45, {1.0}, 0), grid, 0);
        }) == ErrorCode::OrderTooHigh);
  // phi fits inside the window but the initial-condition window does not
  CHECK(error_code_of([&] {
          SolutionSampler s(fx.problem, fx.kcf, make_bump(0.6, 0.3, {1.0}), {1.2, 2000}, 0);
        }) == ErrorCode::GridTooCoarse);
  // an initial-condition window without unit mass is refused up front
  SdaeProblem broken = fx.problem;
  broken.phi0 = make_bump(1.0, 0.5, {2.0});
  CHECK(error_code_of([&] { SolutionSampler s(broken, fx.kcf, phi, grid, 0); }) ==
        ErrorCode::NotNormalized);
}

TEST_CASE("empirical moments are exact on a hand-built sample set") {
  Matrix samples(2, 4);
  samples << 1, 3, 5, -1, 2, 0, 4, 2;
  const auto law = empirical_law(samples);
  CHECK(law.samples == 4);
  CHECK(law.mean(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(law.mean(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(law.cov(0, 0) == doctest::Approx(20.0 / 3.0).epsilon(1e-14));
  CHECK(law.cov(0, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(law.cov(1, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(law.cov(1, 1) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK(law.stdErrMean(0) == doctest::Approx(std::sqrt(20.0 / 3.0 / 4.0)).epsilon(1e-14));
  CHECK(law.stdErrCovDiag(1) ==
        doctest::Approx(8.0 / 3.0 * std::sqrt(2.0 / 3.0)).epsilon(1e-14));

  CHECK(error_code_of([&] { empirical_law(samples.leftCols(1)); }) == ErrorCode::TooFewSamples);

  // large batches agree with the straightforward two-pass formula
  Matrix big(3, 101);
  for (int j = 0; j < big.cols(); ++j)
    for (int i = 0; i < 3; ++i)
      big(i, j) = normal_at(5, static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(i), 0);
  const auto bigLaw = empirical_law(big);
  const Vector mean = big.rowwise().mean();
  const Matrix centered = big.colwise() - mean;
  const Matrix cov = centered * centered.transpose() / (big.cols() - 1.0);
  CHECK((bigLaw.mean - mean).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((bigLaw.cov - cov).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("law comparison accepts a faithful sample and flags distorted ones") {
  const long count = 5000;
  Matrix samples = Matrix::Zero(2, count);
  std::vector<double> buf(count);
  fill_normals(123, 0, 0, buf.data(), count);
  for (long i = 0; i < count; ++i) samples(0, i) = buf[i];

  // component 1 is exactly degenerate on both sides of the comparison
  Matrix cov = Matrix::Zero(2, 2);
  cov(0, 0) = 1.0;
  const GaussianLaw law = plain_law(Vector::Zero(2), cov);
  const auto ok = compare_laws(law, empirical_law(samples));
  INFO("max z = ", ok.maxZ);
  CHECK(ok.pass);
  CHECK(ok.meanZ(1) == 0.0);
  CHECK(ok.covZ(1, 1) == 0.0);

  // inflated variance in component 0
  Matrix wide = samples;
  wide.row(0) *= 1.5;
  const auto tooWide = compare_laws(law, empirical_law(wide));
  CHECK_FALSE(tooWide.pass);
  CHECK(tooWide.covZ(0, 0) > 10.0);

  // any signal on the degenerate component is magnified by the floor
  Matrix leak = samples;
  leak.row(1).setConstant(1e-6);
  const auto leaky = compare_laws(law, empirical_law(leak));
  CHECK_FALSE(leaky.pass);
  CHECK(leaky.meanZ(1) > 1e3);

  Matrix other = Matrix::Zero(3, 10);
  CHECK(error_code_of([&] { compare_laws(law, empirical_law(other)); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("scalar equation: sampler matches the analytic law with drift and start value") {
  SdaeProblem problem = scalar_problem(0.8, 0.9, 0.4);
  ForcingSpec forcing = ForcingSpec::zero(1);
  forcing.set(0, PiecewisePoly{{{0.0, 2.0, {0.25}}}});
  problem.forcing = forcing;
  const auto kcf = compute_kcf(problem.pencil);
  const auto phi = make_bump(1.0, 0.45, {1.0});

  const GaussianLaw law = full_law(problem, kcf, phi);
  SolutionSampler sampler(problem, kcf, phi, {2.0, 2500}, 11);
  const auto emp = empirical_law(sample_batch(sampler, 3000));
  const auto cmp = compare_laws(law, emp);
  INFO("max z = ", cmp.maxZ);
  CHECK(cmp.pass);
}

TEST_CASE("purely algebraic system: sampler reproduces the static law") {
  Matrix A = Matrix::Zero(2, 2);
  Matrix B = Matrix::Identity(2, 2);
  Matrix Lambda(2, 2);
  Lambda << 0.7, 0.0, 0.3, 0.5;
  ForcingSpec forcing = ForcingSpec::zero(2);
  forcing.set(0, PiecewisePoly{{{0.0, 2.0, {1.0, 1.0}}}});
  SdaeProblem problem = make_problem({A, B}, Lambda, forcing, Vector(),
                                     normalized(make_bump(1.0, 0.5, {1.0})));
  const auto kcf = compute_kcf(problem.pencil);
  const auto phi = make_bump(1.0, 0.45, {1.0});

  const GaussianLaw law = full_law(problem, kcf, phi);
  SolutionSampler sampler(problem, kcf, phi, {2.0, 2000}, 31);
  const auto cmp = compare_laws(law, empirical_law(sample_batch(sampler, 3000)));
  INFO("max z = ", cmp.maxZ);
  CHECK(cmp.pass);
}

TEST_CASE("cutset network: sampler agrees with the joint law in matched coordinates") {
  CutsetFixture fx(0.3);
  const auto phi = make_bump(1.0, 0.45, {1.0});
  const SimGrid grid{2.0, 4000};

  SolutionSampler sampler(fx.problem, fx.kcf, phi, grid, 2026);
  const long count = 2500;
  const Matrix ys = sample_batch_y(sampler, count);

  // the second row of the large nilpotent block carries no noise and no
  // forcing, so its samples are exactly zero, not merely small
  CHECK(ys.row(2).cwiseAbs().maxCoeff() == 0.0);

  const GaussianLaw law = joint_kcf_law(fx.problem, fx.kcf, phi);
  const auto cmp = compare_laws(law, empirical_law(ys));
  INFO("max z = ", cmp.maxZ);
  CHECK(cmp.pass);
}
