#include <gtest/gtest.h>

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include "wvlab/error.hpp"
#include "wvlab/json_io.hpp"

using namespace wvlab;

namespace {

class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("wvlab_json_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".json");
    std::ofstream(path_) << contents;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::IoError;
}

}  // namespace

TEST(LoadMeasures, SingleDirac) {
  TempFile f(R"({"dim": 1, "support": [[0.0]], "weights": [1.0]})");
  const auto ms = load_measures(f.path());
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0], dirac(BasePoint{0.0}));
}

TEST(LoadMeasures, RenormalizationWarns) {
  TempFile f(R"({"measures": [{"dim": 1, "support": [[0], [1]], "weights": [0.5, 0.499999999]}]})");
  std::vector<std::string> warnings;
  const auto ms = load_measures(f.path(), &warnings);
  ASSERT_EQ(ms.size(), 1u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("#0"), std::string::npos);
}

TEST(LoadMeasures, InvalidMeasureNamesIndex) {
  TempFile f(R"([{"dim": 1, "support": [[0]], "weights": [1]},
                 {"dim": 1, "support": [[0], [1]], "weights": [-0.5, 1.5]}])");
  try {
    load_measures(f.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidMeasure);
    EXPECT_NE(std::string(e.what()).find("#1"), std::string::npos);
  }
}

TEST(LoadMeasures, SchemaErrors) {
  TempFile missing(R"({"dim": 1, "support": [[0]]})");
  EXPECT_EQ(code_of([&] { load_measures(missing.path()); }), ErrorCode::ParseError);
  TempFile wrong_dim(R"({"dim": 2, "support": [[0]], "weights": [1]})");
  EXPECT_EQ(code_of([&] { load_measures(wrong_dim.path()); }), ErrorCode::ParseError);
  TempFile text(R"({"dim": 1, "support": [["a"]], "weights": [1]})");
  EXPECT_EQ(code_of([&] { load_measures(text.path()); }), ErrorCode::ParseError);
  TempFile broken("{\n\"dim\": 1,\n oops }");
  try {
    load_measures(broken.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { load_measures("/nonexistent/measures.json"); }), ErrorCode::IoError);
}

TEST(MeasureJson, BitExactRoundTrip) {
  Rng rng(5);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int k = 0; k < 200; ++k) {
    // arbitrary finite doubles, printed and parsed back
    std::vector<BasePoint> pts;
    for (int i = 0; i < 3; ++i) {
      double x;
      do {
        x = std::bit_cast<double>(bits(rng));
      } while (!std::isfinite(x));
      pts.push_back(BasePoint{x, random_point(1, 1e3, rng)[0]});
    }
    const auto m = validate_measure(pts, random_measure(1, 3, 1.0, rng).weights());
    const auto text = to_json(m).dump();
    const auto back = measure_from_json(Json::parse(text));
    ASSERT_EQ(back.size(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(back.weight(i)), std::bit_cast<std::uint64_t>(m.weight(i)));
      for (std::size_t c = 0; c < 2; ++c) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back.atom(i)[c]),
                  std::bit_cast<std::uint64_t>(m.atom(i)[c]));
      }
    }
  }
}

TEST(MeasureJson, SeventeenDigitDecimalsParseExactly) {
  const auto m = measure_from_json(Json::parse(
      R"({"dim": 1, "support": [[0.12345678901234567], [-9.8765432109876543e+100]], "weights": [0.25, 0.75]})"));
  EXPECT_EQ(m.atom(0)[0], 0.12345678901234567);
  EXPECT_EQ(m.atom(1)[0], -9.8765432109876543e+100);
  EXPECT_EQ(Json::parse(to_json(m).dump()), to_json(m));
}

TEST(TransportJson, Layout) {
  const auto mu = validate_measure({BasePoint{0}, BasePoint{2}}, {.5, .5});
  const auto nu = validate_measure({BasePoint{1}, BasePoint{3}}, {.5, .5});
  const auto j = to_json(wasserstein_exact(mu, nu, 1.0));
  EXPECT_EQ(j["solver"], "simplex");
  EXPECT_EQ(j["p"], 1.0);
  EXPECT_NEAR(j["value"].get<double>(), 1.0, 1e-12);
  ASSERT_EQ(j["plan"].size(), 2u);
  EXPECT_EQ(j["plan"][0], Json::parse("[0, 0, 0.5]"));
}

TEST(FieldJson, ConfigsEvaluate) {
  const auto omega = validate_measure({BasePoint{2, 0}, BasePoint{-4, 0}}, {.5, .5});
  const auto lifted = field_from_json(Json::parse(
      R"({"type": "lifted", "base": {"type": "busemann", "direction": [1, 0]}})"));
  EXPECT_DOUBLE_EQ(eval_field(lifted, omega), 1.0);
  EXPECT_EQ(lifted.p(), 2.0);

  const auto inf = field_from_json(Json::parse(R"({"type": "inf", "p": 1,
      "members": [{"type": "constant", "value": 5}, {"type": "constant", "value": 2}]})"));
  EXPECT_EQ(eval_field(inf, omega), 2.0);
  EXPECT_EQ(inf.p(), 1.0);

  const auto dist = field_from_json(Json::parse(R"({"type": "distance_to", "offset": 1,
      "target": {"dim": 2, "support": [[2, 0], [-4, 0]], "weights": [0.5, 0.5]}})"));
  EXPECT_EQ(eval_field(dist, omega), -1.0);

  const auto mins = field_from_json(Json::parse(R"({"type": "lifted", "base": {"type": "min", "members": [
      {"type": "busemann", "direction": [1, 0]},
      {"type": "distance_to_points", "points": [[0, 0]], "sign": -1}]}})"));
  EXPECT_DOUBLE_EQ(eval_field(mins, omega), 0.5 * -2.0 + 0.5 * -4.0);

  EXPECT_EQ(code_of([] { field_from_json(Json::parse(R"({"type": "spline"})")); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { field_from_json(Json::parse(R"({"type": "lifted"})")); }),
            ErrorCode::ParseError);
}

TEST(VerdictJson, Envelope) {
  Rng rng(1);
  const auto U = lift(BaseScalarField::busemann(UnitVector{1}), 2.0);
  const auto omega = dirac(BasePoint{0});
  const auto j = verdict_json(viscosity_sphere_test(U, omega, {1.0}, 1e-3, 2, rng));
  EXPECT_EQ(j["op"], "check-viscosity");
  EXPECT_EQ(j["verdict"], "PASS");
  EXPECT_TRUE(j.contains("witness"));
  EXPECT_EQ(j["params"]["eps"], 1e-3);
  const auto& w = j["witness"][0]["witness"];
  EXPECT_EQ(measure_from_json(w["measure"]), dirac(BasePoint{1}));
  EXPECT_DOUBLE_EQ(w["drop"].get<double>(), 1.0);

  const auto s = verdict_json(local_slope_estimate(constant_field(0, 2), omega, {1.0}, 2, rng),
                              "local-slope", true);
  EXPECT_EQ(s["verdict"], "FAIL");
}

TEST(ReportJson, CsAndDlcLayouts) {
  CsParams params;
  params.count = 4;
  params.cluster = 2;
  params.first_index = 2;
  const auto cs = cs_diagnostic(
      [](std::int64_t n) { return dirac(BasePoint{double(n)}); }, dirac(BasePoint{0}), params);
  const auto j = to_json(cs);
  EXPECT_EQ(j["verdict"], "PASS");
  EXPECT_EQ(j["matrix"].size(), 4u);
  EXPECT_EQ(j["params"]["sigma"], 1.0);

  MeasureSetSequence seq{[](std::int64_t n) { return std::vector{dirac(BasePoint{double(n)})}; },
                         [](std::int64_t n) { return double(n); }};
  const auto d = to_json(dlc_limit(seq, dirac(BasePoint{0.5}), 2.0, 1e-9, 8));
  EXPECT_EQ(d["trace"].size(), 4u);
  EXPECT_EQ(d["value"], -0.5);
}
