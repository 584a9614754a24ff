#include <gtest/gtest.h>

#include <cmath>

#include "wvlab/error.hpp"
#include "wvlab/wgeom.hpp"

using namespace wvlab;

namespace {

DiscreteMeasure line(std::vector<double> xs, std::vector<double> ws) {
  std::vector<BasePoint> pts;
  for (double x : xs) pts.push_back(BasePoint{x});
  return validate_measure(std::move(pts), std::move(ws));
}

DiscreteMeasure mixture(std::int64_t n, double p) {
  const double tail = 1.0 / std::pow(double(n), p);
  return line({0.0, double(n) * double(n)}, {1.0 - tail, tail});
}

WassersteinRay translating_ray(const DiscreteMeasure& base, const UnitVector& v, double p) {
  std::vector<BaseRay> rays;
  for (const auto& x : base.support()) rays.emplace_back(x, v);
  return WassersteinRay(base, std::move(rays), p);
}

}  // namespace

TEST(DisplacementPath, DiracTransport) {
  const auto path = displacement_path(line({0}, {1}), line({4}, {1}), 2.0);
  EXPECT_DOUBLE_EQ(path.length(), 4.0);
  EXPECT_EQ(path.eval(2.0), line({2}, {1}));
  EXPECT_EQ(path.eval(0.0), path.source());
  EXPECT_EQ(path.eval(4.0), path.target());
}

TEST(DisplacementPath, MonotonePairingMidpoint) {
  const auto path = displacement_path(line({0, 2}, {.5, .5}), line({1, 3}, {.5, .5}), 2.0);
  EXPECT_NEAR(path.length(), 1.0, 1e-12);
  const auto mid = path.eval(0.5);
  EXPECT_LE(wasserstein(mid, line({0.5, 2.5}, {.5, .5}), 2.0), 1e-12);
}

TEST(DisplacementPath, DegenerateAndOutOfRange) {
  Rng rng(1);
  const auto m = random_measure(2, 4, 1.0, rng);
  const auto path = displacement_path(m, m, 2.0);
  EXPECT_TRUE(path.degenerate());
  EXPECT_EQ(path.eval(0.0), m);

  const auto p2 = displacement_path(line({0}, {1}), line({1}, {1}), 1.0);
  EXPECT_TRUE(p2.non_unique());
  try {
    path_eval(p2, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainError);
  }
}

TEST(DisplacementPath, GeodesicProperty) {
  Rng rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const double p = 1.0 + k % 3;
    const auto mu = random_measure(2, 2 + k % 5, 2.0, rng);
    const auto nu = random_measure(2, 2 + (k + 2) % 6, 2.0, rng);
    const auto path = displacement_path(mu, nu, p);
    EXPECT_LE(wasserstein(path.eval(0.0), mu, p), 1e-10);
    EXPECT_LE(wasserstein(path.eval(path.length()), nu, p), 1e-10);
    for (int s = 0; s < 10; ++s) {
      const double a = unit(rng) * path.length();
      const double b = unit(rng) * path.length();
      EXPECT_NEAR(wasserstein(path.eval(a), path.eval(b), p), std::abs(a - b), 1e-8);
    }
  }
}

TEST(WassersteinRay, RejectsCollidingAtoms) {
  const auto base = line({0, 1}, {.5, .5});
  std::vector<BaseRay> rays{BaseRay(BasePoint{0}, UnitVector{1}),
                            BaseRay(BasePoint{1}, UnitVector{-1})};
  try {
    WassersteinRay(base, rays, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidRay);
  }
}

TEST(BusemannEstimate, OwnRayIsZero) {
  Rng rng(3);
  const auto omega = random_measure(2, 4, 1.0, rng);
  const auto ray = translating_ray(omega, UnitVector{1, 0}, 2.0);
  const auto est = busemann_estimate(ray, omega, 1e-6, 1e4);
  for (const auto& s : est.samples) EXPECT_LE(std::abs(s.g), 1e-6);
  EXPECT_TRUE(est.converged);
}

TEST(BusemannEstimate, DiracRayClosedForm) {
  // g(t) = (t^2 - 2 t m + S)^{1/2} - t with m = sum w <x, v>, S = sum w |x|^2,
  // so g(t) -> -m with error (S - m^2) / (2 (t - m)) + O(t^-2).
  const UnitVector v{0.6, 0.8};
  const auto ray = translating_ray(dirac(BasePoint{0, 0}), v, 2.0);
  const auto omega = validate_measure({BasePoint{0.02, -0.01}, BasePoint{0.05, 0.04}}, {0.4, 0.6});
  double m = 0.0;
  double S = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    m += omega.weight(i) * dot(omega.atom(i), v.vec());
    S += omega.weight(i) * dot(omega.atom(i), omega.atom(i));
  }
  const auto est = busemann_estimate(ray, omega, 1e-12, 1e4);
  EXPECT_NEAR(est.value, -m, 1e-6);
  EXPECT_NEAR(est.value + m, (S - m * m) / (2.0 * (est.truncation - m)), 1e-9);
  for (std::size_t k = 1; k < est.samples.size(); ++k) {
    EXPECT_LE(est.samples[k].g, est.samples[k - 1].g + 1e-9);
  }
}

TEST(BusemannEstimate, PointOnTheRay) {
  const auto ray = translating_ray(line({0, 1}, {.3, .7}), UnitVector{1}, 2.0);
  const double s = 2.5;
  const auto est = busemann_estimate(ray, ray.eval(s), 1e-6, 1e4);
  EXPECT_NEAR(est.value, -s, 1e-6);
}

TEST(SphereSample, DiracTranslation) {
  Rng rng(5);
  SphereSampleOptions only_translation;
  only_translation.atom_shift = false;
  only_translation.transport = false;
  const auto samples = sphere_sample(dirac(BasePoint{0, 0}), 1.0, 2.0, 3, rng, only_translation);
  ASSERT_EQ(samples.size(), 3u);
  for (const auto& s : samples) {
    ASSERT_EQ(s.measure.size(), 1u);
    EXPECT_NEAR(norm(s.measure.atom(0)), 1.0, 1e-12);
    EXPECT_NEAR(s.distance, 1.0, 1e-10);
  }
}

TEST(SphereSample, CertifiedDistancesInBand) {
  Rng rng(6);
  for (int k = 0; k < 10; ++k) {
    const auto omega = random_measure(2, 1 + k % 5, 2.0, rng);
    const double r = 0.1 + 0.2 * k;
    for (const auto& s : sphere_sample(omega, r, 2.0, 9, rng)) {
      EXPECT_GE(s.distance, 0.9 * r);
      EXPECT_LE(s.distance, 1.1 * r);
      EXPECT_NEAR(s.distance, wasserstein(omega, s.measure, 2.0), 1e-12);
      if (s.strategy == SphereStrategy::Translation) EXPECT_NEAR(s.distance, r, 1e-10);
    }
  }
}

TEST(SphereSample, SingleAtomShift) {
  // Shift the atom at 4 by +2: identity pairing costs 1/2 * 4.
  const auto omega = line({0, 4}, {.5, .5});
  const auto moved = line({0, 6}, {.5, .5});
  EXPECT_NEAR(brute_force_oracle(omega, moved, 2.0).value, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(wasserstein(omega, moved, 2.0), std::sqrt(2.0), 1e-12);
}

TEST(SphereSample, FailsWhenBandUnreachable) {
  Rng rng(8);
  SphereSampleOptions impossible;
  impossible.translation = false;
  impossible.band_low = 5.0;
  impossible.band_high = 6.0;
  try {
    sphere_sample(line({0, 1}, {.5, .5}), 1.0, 2.0, 2, rng, impossible);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SphereSamplingFailed);
  }
}

TEST(CsDiagnostic, RaySequencePasses) {
  const auto omega0 = line({0, 1}, {.5, .5});
  const auto ray = translating_ray(omega0, UnitVector{1}, 2.0);
  CsParams params;
  params.sigma = 1.0;
  params.first_index = 2;
  params.count = 10;
  params.cluster = 5;
  params.eps = 1e-9;
  const auto rep = cs_diagnostic([&](std::int64_t n) { return ray.eval(double(n)); }, omega0, params);
  EXPECT_EQ(rep.verdict, Verdict::Pass);
  EXPECT_LE(rep.min_offdiagonal, 1e-12);
}

TEST(CsDiagnostic, EscapingDiracsCluster) {
  CsParams params;
  params.sigma = 1.0;
  params.first_index = 2;
  params.count = 60;
  params.cluster = 4;
  params.eps = 0.2;
  const auto rep = cs_diagnostic(
      [](std::int64_t n) {
        const double a = double(n);
        return dirac(BasePoint{a * std::cos(a), a * std::sin(a)});
      },
      dirac(BasePoint{0, 0}), params);
  EXPECT_EQ(rep.verdict, Verdict::Pass);
}

TEST(CsDiagnostic, EscapingMixturesDoNotCluster) {
  CsParams params;
  params.sigma = 1.0;
  params.first_index = 2;
  params.count = 30;
  params.cluster = 3;
  params.eps = 0.05;
  const auto rep =
      cs_diagnostic([](std::int64_t n) { return mixture(n, 2.0); }, line({0}, {1}), params);
  // sphere point n is (1 - n^-2) delta_0 + n^-2 delta_n
  EXPECT_LE(wasserstein(dirac(BasePoint{0}), line({0, 5}, {1 - 1 / 25.0, 1 / 25.0}), 2.0), 1.0 + 1e-12);
  EXPECT_EQ(rep.verdict, Verdict::Fail);
  EXPECT_GT(rep.min_offdiagonal, 0.0);
}

TEST(CsDiagnostic, TooCloseSequence) {
  CsParams params;
  params.sigma = 2.0;
  params.first_index = 1;
  params.count = 3;
  try {
    cs_diagnostic([](std::int64_t n) { return mixture(n, 2.0); }, line({0}, {1}), params);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SequenceTooClose);
  }
}

TEST(DlcLimit, RaySetsGiveBusemann) {
  const auto omega0 = line({0, 1}, {.5, .5});
  const auto ray = translating_ray(omega0, UnitVector{-1}, 2.0);
  const auto omega = line({3, -2, 0.5}, {.2, .3, .5});
  MeasureSetSequence seq{[&](std::int64_t n) { return std::vector{ray.eval(double(n))}; },
                         [](std::int64_t n) { return double(n); }};
  const double tol = 1e-6;
  const auto dlc = dlc_limit(seq, omega, 2.0, tol, 1 << 20);
  const auto bus = busemann_estimate(ray, omega, tol, double(1 << 20));
  EXPECT_NEAR(dlc.value, bus.value, 2 * tol);
}

TEST(DlcLimit, MixtureDistancesFlatten) {
  // W_2(delta_1, omega_n)^2 = (1 - 1/n^2) + (n^2 - 1)^2 / n^2 = n^2 - 1
  MeasureSetSequence seq{[](std::int64_t n) { return std::vector{mixture(n, 2.0)}; },
                         [](std::int64_t n) { return double(n); }};
  const auto res = dlc_limit(seq, line({1}, {1}), 2.0, 1e-3, 100);
  EXPECT_EQ(res.samples.back().n, 100);
  EXPECT_NEAR(res.value, std::sqrt(9999.0) - 100.0, 1e-10);
  EXPECT_LE(std::abs(res.value), 0.01);
}

TEST(DlcLimit, ConstantSetIsZero) {
  Rng rng(2);
  const auto omega = random_measure(1, 3, 1.0, rng);
  MeasureSetSequence seq{[&](std::int64_t) { return std::vector{omega}; },
                         [](std::int64_t) { return 0.0; }};
  const auto res = dlc_limit(seq, omega, 2.0, 1e-9, 16);
  for (const auto& s : res.samples) EXPECT_EQ(s.value, 0.0);
  EXPECT_TRUE(res.converged);

  MeasureSetSequence empty{[](std::int64_t) { return std::vector<DiscreteMeasure>{}; },
                           [](std::int64_t) { return 0.0; }};
  EXPECT_THROW(dlc_limit(empty, omega, 2.0, 1e-9, 16), Error);
}

TEST(BusemannEstimate, SamplesMatchDirectDistances) {
  Rng rng(21);
  for (int k = 0; k < 20; ++k) {
    const double p = 1.0 + k % 3;
    const auto base = random_measure(2, 1 + k % 4, 1.0, rng);
    const auto ray = translating_ray(base, random_unit_vector(2, rng), p);
    const auto omega = random_measure(2, 1 + k % 5, 2.0, rng);
    for (const auto& s : busemann_estimate(ray, omega, 1e-6, 64.0).samples) {
      EXPECT_NEAR(s.g, wasserstein(omega, ray.eval(s.t), p) - s.t, 1e-10);
    }
  }
}
