#include <gtest/gtest.h>

#include <cmath>

#include "wvlab/error.hpp"
#include "wvlab/viscosity.hpp"

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

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::IoError;
}

MeasureField min_of_busemann(double p) {
  return lift(min_combine({BaseScalarField::busemann(UnitVector{1, 0}),
                           BaseScalarField::busemann(UnitVector{0, 1}, 0.5)}),
              p);
}

std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> random_pairs(std::size_t d, int count,
                                                                      Rng& rng) {
  std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> pairs;
  for (int k = 0; k < count; ++k) {
    pairs.emplace_back(random_measure(d, 1 + k % 5, 3.0, rng), random_measure(d, 1 + k % 4, 3.0, rng));
  }
  return pairs;
}

// u = 0 on x <= 0 and u = -x on x > 0; no closed-form ray is attached.
MeasureField corrected_line_field() {
  CustomField c;
  c.dim = 1;
  c.eval = [](const BasePoint& x) { return std::min(0.0, -x[0]); };
  c.lipschitz = 1.0;
  c.name = "corrected";
  return lift(BaseScalarField::custom(c), 2.0);
}

}  // namespace

TEST(Lift, Examples) {
  Rng rng(1);
  const auto c = constant_field(4.0, 2.0);
  EXPECT_EQ(eval_field(c, random_measure(2, 3, 1.0, rng)), 4.0);

  const auto b = lift(BaseScalarField::busemann(UnitVector{1, 0}), 2.0);
  EXPECT_EQ(eval_field(b, dirac(BasePoint{3, 1})), -3.0);
  const auto m = validate_measure({BasePoint{2, 0}, BasePoint{-4, 0}}, {.5, .5});
  EXPECT_DOUBLE_EQ(eval_field(b, m), 1.0);
}

TEST(EvalField, Examples) {
  EXPECT_DOUBLE_EQ(eval_field(distance_field(line({0}, {1}), 0.0, 2.0), line({3}, {1})), 3.0);
  EXPECT_EQ(eval_field(inf_of_fields({constant_field(5, 2), constant_field(2, 2)}), line({0}, {1})),
            2.0);
  const auto u10 = distance_field(mixture(10, 2.0), 10.0, 2.0);
  EXPECT_NEAR(eval_field(u10, line({1}, {1})), std::sqrt(99.0) - 10.0, 1e-12);
}

TEST(EvalField, BusemannFieldMemoizes) {
  const auto base = line({0, 1}, {.5, .5});
  std::vector<BaseRay> rays;
  for (const auto& x : base.support()) rays.emplace_back(x, UnitVector{1});
  const auto U = busemann_field(WassersteinRay(base, rays, 2.0));
  const auto omega = line({-1, 2}, {.25, .75});
  const double first = eval_field(U, omega);
  EXPECT_EQ(eval_field(U, omega), first);
  const auto copy = U;
  EXPECT_EQ(eval_field(copy, omega), first);
  EXPECT_NEAR(eval_field(U, base), 0.0, 1e-6);
}

TEST(InfOfFields, SingletonAndErrors) {
  const auto b = lift(BaseScalarField::busemann(UnitVector{1}), 2.0);
  EXPECT_EQ(inf_of_fields({b}).kind(), b.kind());
  EXPECT_EQ(code_of([] { inf_of_fields({}); }), ErrorCode::EmptyCollection);
  EXPECT_THROW(inf_of_fields({constant_field(0, 1), constant_field(0, 2)}), Error);
}

TEST(LipschitzProbe, Examples) {
  Rng rng(4);
  const auto pairs = random_pairs(2, 100, rng);
  EXPECT_EQ(lipschitz_probe(constant_field(3, 2), pairs).max_ratio, 0.0);
  EXPECT_LE(lipschitz_probe(distance_field(random_measure(2, 4, 2.0, rng), 0.5, 2.0), pairs).max_ratio,
            1.0 + 1e-9);
  EXPECT_LE(lipschitz_probe(lift(BaseScalarField::busemann(random_unit_vector(2, rng)), 2.0), pairs)
                .max_ratio,
            1.0 + 1e-9);
  const auto m = dirac(BasePoint{0, 0});
  EXPECT_EQ(code_of([&] { lipschitz_probe(constant_field(0, 2), {{m, m}}); }), ErrorCode::NoUsablePairs);
}

TEST(LipschitzProbe, EveryNonConstantVariantIsOneLipschitz) {
  Rng rng(12);
  const auto pairs = random_pairs(2, 200, rng);
  const auto ray_base = random_measure(2, 2, 1.0, rng);
  std::vector<BaseRay> rays;
  for (const auto& x : ray_base.support()) rays.emplace_back(x, UnitVector{0.6, 0.8});
  const std::vector<MeasureField> fields = {
      min_of_busemann(2.0),
      distance_field(random_measure(2, 3, 1.0, rng), 1.0, 2.0),
      busemann_field(WassersteinRay(ray_base, rays, 2.0), BusemannParams{1e-9, 1e6}),
      inf_of_fields({min_of_busemann(2.0), distance_field(dirac(BasePoint{1, 1}), 0.0, 2.0)}),
  };
  for (const auto& U : fields) EXPECT_LE(lipschitz_probe(U, pairs).max_ratio, 1.0 + 1e-9) << U.kind();
}

TEST(LocalSlope, Examples) {
  Rng rng(2);
  const std::vector<double> radii{1.0, 0.5, 0.25};
  EXPECT_EQ(local_slope_estimate(constant_field(0, 2), line({0}, {1}), radii, 6, rng).value, 0.0);
  const auto est = local_slope_estimate(lift(BaseScalarField::busemann(UnitVector{1}), 2.0),
                                        line({0}, {1}), radii, 6, rng);
  EXPECT_NEAR(est.value, 1.0, 1e-12);
  ASSERT_TRUE(est.witness.has_value());
  EXPECT_NEAR(est.witness->drop() / est.witness->distance, est.value, 1e-15);
}

TEST(GlobalSlope, Examples) {
  std::vector<DiscreteMeasure> dict;
  for (int y = 1; y <= 100; ++y) dict.push_back(line({double(y)}, {1}));
  const auto omega = line({-1}, {1});
  EXPECT_EQ(global_slope_estimate(constant_field(0, 2), omega, dict).value, 0.0);
  const auto est = global_slope_estimate(corrected_line_field(), omega, dict);
  EXPECT_NEAR(est.value, 100.0 / 101.0, 1e-12);
  EXPECT_GE(est.value, 0.99);

  const auto b = lift(BaseScalarField::busemann(UnitVector{-1}), 2.0);
  EXPECT_LE(global_slope_estimate(b, omega, dict).value, 1.0 + 1e-9);
  EXPECT_EQ(code_of([&] { global_slope_estimate(b, omega, {omega}); }), ErrorCode::NoUsablePairs);
}

TEST(SphereTest, MinOfBusemannPasses) {
  Rng rng(3);
  const auto U = min_of_busemann(2.0);
  for (int k = 0; k < 5; ++k) {
    const auto omega = random_measure(2, 1 + k, 2.0, rng);
    const auto rep = viscosity_sphere_test(U, omega, {1.0, 0.5, 0.1}, 1e-3, 4, rng);
    EXPECT_EQ(rep.verdict, Verdict::Pass);
    for (const auto& r : rep.radii) {
      ASSERT_TRUE(r.witness.has_value());
      // replay from scratch
      const auto& w = *r.witness;
      const double d = wasserstein(omega, w.measure, 2.0);
      const double drop = eval_field(U, omega) - eval_field(U, w.measure);
      EXPECT_NEAR(drop / d, w.drop() / w.distance, 1e-9);
    }
  }
}

TEST(SphereTest, ConstantFails) {
  Rng rng(4);
  const auto rep = viscosity_sphere_test(constant_field(0, 2), line({0, 1}, {.5, .5}),
                                         {1.0, 0.5}, 1e-3, 6, rng);
  EXPECT_EQ(rep.verdict, Verdict::Fail);
  for (const auto& r : rep.radii) EXPECT_NEAR(r.best_gap, r.radius, 0.1 * r.radius);
}

TEST(SphereTest, DistanceToDiracPasses) {
  Rng rng(5);
  const auto rep = viscosity_sphere_test(distance_field(line({0}, {1}), 0.0, 2.0), line({3}, {1}),
                                         {1.0, 0.5, 0.1}, 1e-3, 4, rng);
  EXPECT_EQ(rep.verdict, Verdict::Pass);
}

TEST(SphereTest, InfOfBusemannPassesAndConstantMemberFails) {
  Rng rng(6);
  const auto U = inf_of_fields({lift(BaseScalarField::busemann(UnitVector{1, 0}), 2.0),
                                lift(BaseScalarField::busemann(UnitVector{-0.6, 0.8}), 2.0)});
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(viscosity_sphere_test(U, random_measure(2, 3, 2.0, rng), {1.0, 0.5, 0.1}, 1e-3, 4, rng)
                  .verdict,
              Verdict::Pass);
  }
  const auto dominated = inf_of_fields({U, constant_field(-1e6, 2.0)});
  EXPECT_EQ(viscosity_sphere_test(dominated, random_measure(2, 3, 2.0, rng), {1.0}, 1e-3, 4, rng)
                .verdict,
            Verdict::Fail);
}

TEST(DlgTest, Examples) {
  Rng rng(7);
  const auto U = lift(BaseScalarField::busemann(UnitVector{0, 1}), 2.0);
  const auto omega = random_measure(2, 3, 1.0, rng);
  const double u0 = eval_field(U, omega);
  EXPECT_EQ(dlg_test(U, omega, {u0 - 1, u0 - 10}, 4, rng).verdict, Verdict::Pass);
  EXPECT_EQ(dlg_test(constant_field(2, 2), omega, {1.0}, 4, rng).verdict, Verdict::Fail);
  EXPECT_EQ(code_of([&] { dlg_test(U, omega, {u0}, 4, rng); }), ErrorCode::DomainError);
}

TEST(GreedyDescent, BusemannFollowsRay) {
  Rng rng(8);
  const auto U = lift(BaseScalarField::busemann(UnitVector{1, 0}), 2.0);
  const auto poly = greedy_descent(U, random_measure(2, 3, 1.0, rng), 1e-3, 20, rng);
  EXPECT_FALSE(poly.stall.has_value());
  ASSERT_EQ(poly.vertices.size(), 21u);
  EXPECT_NEAR(poly.values.front() - poly.values.back(), 20.0, 1e-8);
  EXPECT_LE(poly.max_slack(), poly.epsilon + 1e-9);
  for (std::size_t k = 0; k < poly.vertices.size(); ++k) {
    EXPECT_GE(poly.distance_from_start[k], poly.times[k] - poly.epsilon);
  }
}

TEST(GreedyDescent, ConstantStalls) {
  Rng rng(9);
  const auto poly = greedy_descent(constant_field(0, 2), line({0}, {1}), 0.1, 5, rng);
  ASSERT_TRUE(poly.stall.has_value());
  EXPECT_EQ(poly.stall->step, 1u);
  EXPECT_EQ(poly.vertices.size(), 1u);
}

TEST(GreedyDescent, InfOfSwitchesAtMostOnce) {
  Rng rng(10);
  const auto U = inf_of_fields({lift(BaseScalarField::busemann(UnitVector{1, 0}), 2.0),
                                lift(BaseScalarField::busemann(UnitVector{0, 1}, 2.0), 2.0)});
  const auto poly = greedy_descent(U, dirac(BasePoint{0, 0}), 0.5, 8, rng);
  EXPECT_FALSE(poly.stall.has_value());
  EXPECT_LE(poly.max_slack(), 0.5 + 1e-9);
  int switches = 0;
  int prev = -1;
  for (std::size_t k = 1; k < poly.vertices.size(); ++k) {
    const auto step = poly.vertices[k].atom(0) - poly.vertices[k - 1].atom(0);
    const int dir = std::abs(step[0]) > std::abs(step[1]) ? 0 : 1;
    if (prev >= 0 && dir != prev) ++switches;
    prev = dir;
  }
  EXPECT_LE(switches, 1);
}

TEST(LiftedRay, Examples) {
  const auto U = lift(BaseScalarField::busemann(UnitVector{1, 0}), 2.0);
  const auto omega = validate_measure({BasePoint{0, 0}, BasePoint{5, 5}}, {.5, .5});
  const auto ray = lifted_ray(U, omega);
  EXPECT_EQ(ray.eval(3.0), validate_measure({BasePoint{3, 0}, BasePoint{8, 5}}, {.5, .5}));
  EXPECT_NEAR(eval_field(U, ray.eval(0)) - eval_field(U, ray.eval(7)), 7.0, 1e-10);
  EXPECT_NEAR(wasserstein(ray.eval(0), ray.eval(7), 2.0), 7.0, 1e-8);
  EXPECT_EQ(code_of([&] { lifted_ray(constant_field(0, 2), omega); }), ErrorCode::UnsupportedField);
}

TEST(LiftedRay, CalibrationIdentity) {
  Rng rng(11);
  for (int k = 0; k < 50; ++k) {
    const std::size_t d = 1 + k % 3;
    const auto U = lift(BaseScalarField::busemann(random_unit_vector(d, rng), 0.1 * k), 1.0 + k % 3);
    const auto omega = random_measure(d, 1 + k % 6, 2.0, rng);
    const auto ray = lifted_ray(U, omega);
    const double ts[] = {0, 1, 5, 10};
    for (double a : ts) {
      for (double b : ts) {
        if (b <= a) continue;
        EXPECT_NEAR(eval_field(U, ray.eval(a)) - eval_field(U, ray.eval(b)), b - a, 1e-10);
        EXPECT_NEAR(wasserstein(ray.eval(a), ray.eval(b), U.p()), b - a, 1e-8);
      }
    }
  }
}

TEST(RepresentationCheck, BusemannPasses) {
  Rng rng(12);
  const auto U = lift(BaseScalarField::busemann(UnitVector{0.6, 0.8}), 2.0);
  const auto omega = random_measure(2, 3, 1.0, rng);
  std::vector<WassersteinRay> rays;
  for (int k = 0; k < 5; ++k) rays.push_back(lifted_ray(U, random_measure(2, 2 + k % 3, 3.0, rng)));
  const auto rep = representation_check(U, omega, rays);
  EXPECT_EQ(rep.verdict, Verdict::Pass);
  ASSERT_TRUE(rep.own_ray.has_value());
  EXPECT_LE(std::abs(rep.own_ray->value), 1e-6);
}

TEST(RepresentationCheck, WrongDirectionRejected) {
  const auto U = lift(BaseScalarField::busemann(UnitVector{1, 0}), 2.0);
  const auto start = dirac(BasePoint{0, 0});
  const WassersteinRay wrong(start, {BaseRay(BasePoint{0, 0}, UnitVector{-1, 0})}, 2.0);
  EXPECT_EQ(code_of([&] { representation_check(U, start, {wrong}); }), ErrorCode::InvalidRay);
}

TEST(Properties, SubrayRecovery) {
  Rng rng(13);
  const auto U = lift(BaseScalarField::busemann(UnitVector{0, -1}), 2.0);
  const auto omega = random_measure(2, 3, 1.0, rng);
  const auto ray = lifted_ray(U, omega);
  const double tau = 2.5;
  const auto poly = greedy_descent(U, ray.eval(tau), 1e-6, 5, rng);
  for (std::size_t t : {1u, 2u, 5u}) {
    EXPECT_LE(wasserstein(poly.vertices[t], ray.eval(tau + double(t)), 2.0), 1e-8);
  }
}

TEST(Properties, SublevelWitnessesRecoverField) {
  Rng rng(14);
  const auto U = lift(BaseScalarField::busemann(UnitVector{1, 0}), 2.0);
  const auto omega = random_measure(2, 3, 0.4, rng);
  const double u0 = eval_field(U, omega);
  const auto ray = lifted_ray(U, omega);
  // analytic witness for the level -n sits at arc length u0 + n
  MeasureSetSequence seq{[&](std::int64_t n) { return std::vector{ray.eval(u0 + double(n))}; },
                         [](std::int64_t n) { return double(n); }};
  const auto res = dlc_limit(seq, omega, 2.0, 1e-9, 1 << 10);
  EXPECT_NEAR(res.value, u0, 1e-6);
}

TEST(Properties, SlopeDichotomy) {
  Rng rng(15);
  const auto U = min_of_busemann(2.0);
  const std::vector<double> radii{1.0, 0.5, 0.1};
  for (int k = 0; k < 5; ++k) {
    const auto omega = random_measure(2, 2, 2.0, rng);
    ASSERT_EQ(viscosity_sphere_test(U, omega, radii, 1e-3, 4, rng).verdict, Verdict::Pass);
    EXPECT_GE(local_slope_estimate(U, omega, radii, 4, rng).value, 1.0 - 1e-3);
    EXPECT_EQ(local_slope_estimate(constant_field(1, 2), omega, radii, 4, rng).value, 0.0);
  }
}
