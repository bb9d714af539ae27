#include <gtest/gtest.h>

#include <string>

#include "cpbtls/config.hpp"
#include "cpbtls/errors.hpp"
#include "support/fixtures.hpp"

namespace cpbtls {
namespace {

constexpr const char* kSingleTls = R"(# single TLS, set 4
model.tls_count = 1
cpb.e_c_ghz = 4.5
cpb.e_j_max_ghz = 6.33

tls1.e_r_ghz = 0.62
tls1.t_lr_ghz = 0.06   # tunneling
tls1.e_int_ghz = 0.35
tls1.delta_e_j_ghz = 2.02
grid.start = 0.9
grid.stop = 1.1
grid.step = 0.01
)";

ParseError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ParseError for:\n" << text;
  return ParseError("none");
}

TEST(Config, ParsesSingleTls) {
  const RunConfig cfg = parse_config(kSingleTls);
  EXPECT_EQ(cfg.model.cpb.e_c, 4.5);
  EXPECT_EQ(cfg.model.cpb.e_j_max, 6.33);
  EXPECT_EQ(cfg.model.cpb.n_charge_states, 4);
  ASSERT_EQ(cfg.model.tls_count(), 1);
  EXPECT_EQ(cfg.model.tls[0].e_r, 0.62);
  EXPECT_EQ(cfg.model.tls[0].t_lr, 0.06);
  EXPECT_EQ(cfg.model.tls[0].e_int, 0.35);
  EXPECT_EQ(cfg.model.tls[0].delta_e_j, 2.02);
  EXPECT_EQ(cfg.grid.start, 0.9);
  EXPECT_EQ(cfg.grid.step, 0.01);
  EXPECT_EQ(cfg.max_states, 4);
  EXPECT_FALSE(cfg.resonator.has_value());
  EXPECT_FALSE(cfg.geometry.has_value());
  EXPECT_EQ(cfg.fit.seeds, 0);
  EXPECT_EQ(cfg.fit.max_iterations, 5000);
  EXPECT_EQ(cfg.fit.policy, AssignmentPolicy::nearest_branch);
}

TEST(Config, EmptyFileListsRequiredKeys) {
  const ParseError e = parse_error("");
  const std::string what = e.what();
  EXPECT_NE(what.find("model.tls_count"), std::string::npos);
  EXPECT_NE(what.find("cpb.e_c_ghz"), std::string::npos);
  EXPECT_NE(what.find("cpb.e_j_max_ghz"), std::string::npos);
}

TEST(Config, MissingTlsKeysNamed) {
  const ParseError e = parse_error("model.tls_count = 1\ncpb.e_c_ghz = 4.5\ncpb.e_j_max_ghz = 6\n");
  EXPECT_NE(std::string(e.what()).find("tls1.delta_e_j_ghz"), std::string::npos);
}

TEST(Config, DuplicateKeyReportsSecondLine) {
  const ParseError e = parse_error("cpb.e_c_ghz = 4.5\ncpb.e_c_ghz = 4.6\n");
  EXPECT_EQ(e.line(), 2);
  EXPECT_EQ(e.key(), "cpb.e_c_ghz");
  EXPECT_NE(std::string(e.what()).find("cpb.e_c_ghz"), std::string::npos);
}

TEST(Config, UnknownKeyRejected) {
  const ParseError e = parse_error(std::string(kSingleTls) + "cpb.e_l_ghz = 1\n");
  EXPECT_EQ(e.line(), 13);
  EXPECT_EQ(e.key(), "cpb.e_l_ghz");
}

TEST(Config, MalformedNumbers) {
  for (const char* bad : {"4.5x", "abc", "1e", "--1", "4.5.1", "0x10"}) {
    const ParseError e =
        parse_error(std::string("model.tls_count = 0\ncpb.e_c_ghz = ") + bad + "\ncpb.e_j_max_ghz = 6\n");
    EXPECT_EQ(e.line(), 2) << bad;
    EXPECT_EQ(e.key(), "cpb.e_c_ghz") << bad;
  }
  EXPECT_EQ(parse_config("model.tls_count = 0\ncpb.e_c_ghz = 4.5e0\ncpb.e_j_max_ghz = .6e1\n")
                .model.cpb.e_j_max,
            6.0);
}

TEST(Config, MaxStatesDefaultFitsBareBox) {
  EXPECT_EQ(parse_config("model.tls_count = 0\ncpb.e_c_ghz = 4.5\ncpb.e_j_max_ghz = 6\n").max_states, 3);
  EXPECT_EQ(parse_config("model.tls_count = 0\ncpb.e_c_ghz = 4.5\ncpb.e_j_max_ghz = 6\n"
                         "cpb.n_charge_states = 2\n")
                .max_states,
            1);
}

TEST(Config, LineWithoutEquals) {
  EXPECT_EQ(parse_error("model.tls_count 0\n").line(), 1);
}

TEST(Config, CommentsAndBlankLinesIgnored) {
  const RunConfig a = parse_config(kSingleTls);
  std::string noisy = "\n\n# header\n   \n";
  noisy += kSingleTls;
  noisy += "\n# trailing\n";
  EXPECT_EQ(parse_config(noisy), a);
}

TEST(Config, UnusedTlsKeysRejected) {
  std::string text = kSingleTls;
  text += "tls2.e_r_ghz = 0.1\n";
  EXPECT_EQ(parse_error(text).key(), "tls2.e_r_ghz");
  text = kSingleTls;
  text += "tls.t12_ghz = 0.04\n";
  EXPECT_EQ(parse_error(text).key(), "tls.t12_ghz");
}

TEST(Config, RangeChecks) {
  const std::string base = kSingleTls;
  EXPECT_EQ(parse_error(base + "cpb.n_charge_states = 9\n").key(), "cpb.n_charge_states");
  EXPECT_EQ(parse_error(base + "spectrum.max_states = 8\n").key(), "spectrum.max_states");
  EXPECT_EQ(parse_error(base + "resonator.g_ghz = 0.1\n").key(), "resonator.g_ghz");
  EXPECT_EQ(parse_error(base + "fit.policy = greedy\n").key(), "fit.policy");
  EXPECT_EQ(parse_error(base + "fit.seeds = -1\n").key(), "fit.seeds");
  EXPECT_EQ(parse_error(base + "fit.max_iterations = 0\n").key(), "fit.max_iterations");
  EXPECT_EQ(parse_error(base + "fit.bound.e_c.min = 5\nfit.bound.e_c.max = 4\n").key(),
            "fit.bound.e_c.max");
  EXPECT_EQ(parse_error(base + "fit.bound.e_x.min = 5\n").key(), "fit.bound.e_x.min");
}

TEST(Config, SerializeRoundTrip) {
  std::string text = kSingleTls;
  text +=
      "resonator.omega_r_ghz = 5.4\nresonator.g_ghz = 0.05\ngeometry.area_nm2 = 40000\n"
      "fit.policy = hinted\nfit.seeds = 12\nfit.rng_seed = 18446744073709551615\n"
      "fit.max_iterations = 200\nfit.bound.e_c.min = 4\nfit.bound.e_c.max = 5\n"
      "output.spectrum_csv = out/spectrum.csv\nanalysis.temperature_mk = 40\n";
  const RunConfig cfg = parse_config(text);
  const std::string canonical = serialize_config(cfg);
  const RunConfig again = parse_config(canonical);
  EXPECT_EQ(serialize_config(again), canonical);
  EXPECT_EQ(again.fit.rng_seed, 18446744073709551615ULL);
  EXPECT_EQ(again.fit.max_iterations, 200);
  EXPECT_EQ(again.fit.policy, AssignmentPolicy::hinted);
  ASSERT_TRUE(again.resonator.has_value());
  EXPECT_EQ(again.resonator->omega_r, 5.4);
  ASSERT_TRUE(again.geometry.has_value());
  EXPECT_EQ(again.geometry->area_nm2, 40000.0);
  EXPECT_EQ(again.geometry->junction_count, 2);
  EXPECT_EQ(again.outputs.spectrum_csv, "out/spectrum.csv");
}

TEST(Config, RoundTripPreservesAwkwardDoubles) {
  RunConfig cfg = parse_config(kSingleTls);
  cfg.model.tls[0].e_r = 0.1 + 0.2;
  cfg.model.cpb.e_j_max = 1.0 / 3.0;
  const RunConfig again = parse_config(serialize_config(cfg));
  EXPECT_EQ(again.model.tls[0].e_r, 0.1 + 0.2);
  EXPECT_EQ(again.model.cpb.e_j_max, 1.0 / 3.0);
}

TEST(Config, TwoTls) {
  const std::string text =
      "model.tls_count = 2\ncpb.e_c_ghz = 4.3\ncpb.e_j_max_ghz = 2.79\n"
      "tls1.e_r_ghz = 0.62\ntls1.t_lr_ghz = 0\ntls1.e_int_ghz = -0.40\ntls1.delta_e_j_ghz = 1.36\n"
      "tls2.e_r_ghz = -0.82\ntls2.t_lr_ghz = 0.04\ntls2.e_int_ghz = 0.13\ntls2.delta_e_j_ghz = -1.00\n"
      "tls.t12_ghz = 0.04\n";
  const RunConfig cfg = parse_config(text);
  const ModelConfig expected = testing::table_two(1);
  ASSERT_EQ(cfg.model.tls_count(), 2);
  EXPECT_EQ(cfg.model.t_12, expected.t_12);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(cfg.model.tls[i].e_r, expected.tls[i].e_r);
    EXPECT_EQ(cfg.model.tls[i].t_lr, expected.tls[i].t_lr);
    EXPECT_EQ(cfg.model.tls[i].e_int, expected.tls[i].e_int);
    EXPECT_EQ(cfg.model.tls[i].delta_e_j, expected.tls[i].delta_e_j);
  }
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
  EXPECT_EQ(parse_error(text.substr(0, text.rfind("tls.t12"))).key(), "tls.t12_ghz");
}

TEST(Config, ApplyBoundsOverridesByKind) {
  RunConfig cfg = parse_config(std::string(kSingleTls) +
                               "fit.bound.e_j.min = 5\nfit.bound.e_j.max = 7\nfit.bound.t_lr.max = 0.1\n");
  const ModelConfig truth = testing::table_one(4);
  RidgeDataset a = synthesize_ridge(truth, make_grid(0.9, 1.1, 0.02), "a", {0.0, 1});
  RidgeDataset b = a;
  b.label = "b";
  FitProblem problem({a, b}, 1);
  const std::vector<double> lo_before = problem.lower_bounds();
  apply_bounds(cfg.fit, problem);
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const FitParameter& p = problem.parameters()[i];
    if (p.kind == ParameterKind::e_j) {
      EXPECT_EQ(p.lower, 5.0);
      EXPECT_EQ(p.upper, 7.0);
    } else if (p.kind == ParameterKind::t_lr) {
      EXPECT_EQ(p.lower, lo_before[i]);
      EXPECT_EQ(p.upper, 0.1);
    } else {
      EXPECT_EQ(p.lower, lo_before[i]);
    }
  }
}

}  // namespace
}  // namespace cpbtls
