#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kurasync/serialize.hpp"

using namespace kurasync;

TEST(Json, ProfileFields) {
  const auto j = to_json(ExpanderProfile::regular(0.1, 50, 7));
  for (const char* k : {"n", "d_ref", "alpha", "c_minus", "c_plus", "tol", "source"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["source"], "asserted");
  EXPECT_EQ(j["c_minus"].get<double>(), -0.1);
}

TEST(Json, DoublesRoundTripExactly) {
  const double v = 0.1 + 0.2;
  const auto text = Json{{"x", v}}.dump();
  EXPECT_EQ(Json::parse(text)["x"].get<double>(), v);
  EXPECT_TRUE(num(INFINITY).is_null());
  EXPECT_TRUE(num(NAN).is_null());
}

TEST(Json, PhaseStateIsArrayOfRadians) {
  const auto j = phases_to_json({0.5, -1.25});
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[1].get<double>(), -1.25);
}

TEST(Json, MixingReportRecords) {
  const auto g = gen_named(NamedFamily::complete, 12);
  const auto r = check_mixing_bounds(g, expander_profile(g, 11.0), 5, 1);
  const auto j = to_json(r);
  ASSERT_FALSE(j["entries"].empty());
  for (const char* k : {"lemma", "X_size", "Y_size", "lower", "value", "upper", "slack"}) {
    EXPECT_TRUE(j["entries"][0].contains(k)) << k;
  }
  EXPECT_FALSE(to_json(r, false).contains("entries"));
}

TEST(Schedule, JsonRoundTrip) {
  const auto s = preset_schedule();
  const auto back = schedule_from_json(to_json(s));
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(step_kind(back[i]), step_kind(s[i]));
    EXPECT_EQ(to_json(back[i]), to_json(s[i]));
  }
}

TEST(Schedule, RejectsMalformed) {
  EXPECT_THROW(schedule_from_json(Json::object()), InputError);
  EXPECT_THROW(schedule_from_json(Json::parse(R"([{"kind":"L43","eps":0.1}])")), InputError);
  EXPECT_THROW(schedule_from_json(Json::parse(R"([{"kind":"L45","eps":0.1}])")), InputError);
  EXPECT_THROW(schedule_from_json(Json::parse(R"([{"eps":0.1}])")), InputError);
  EXPECT_THROW(read_schedule("/nonexistent/schedule.json"), InputError);
}

TEST(Csv, TraceColumns) {
  const auto t = amplification_run(ExpanderProfile::regular(0.0816), preset_schedule(), AmpMode::numeric, true);
  std::ostringstream out;
  write_trace_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,beta_k,mass_frac,step_kind,mass_unit");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string k, beta;
    std::getline(cells, k, ',');
    std::getline(cells, beta, ',');
    EXPECT_EQ(std::stod(beta), t.rows[rows - 1].beta);
  }
  EXPECT_EQ(rows, t.rows.size());
}

TEST(Csv, FlowColumns) {
  const auto g = gen_named(NamedFamily::complete, 6);
  const auto r = flow(g, random_phase_state(6, 1));
  std::ostringstream out;
  write_flow_csv(out, r);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "time,energy,grad_norm,rho1");
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), r.energy_trace.size() + 1);
}

TEST(Json, ErPredictionCarriesVerdict) {
  const auto j = to_json(er_prediction(1e4, 1.5, 0.3));
  EXPECT_EQ(j["verdict"], kVacuousVerdict);
  EXPECT_EQ(j["failure_prob_label"], "proof-explicit bound");
}
