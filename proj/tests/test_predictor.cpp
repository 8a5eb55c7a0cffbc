#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"
#include "tramsim/predictor.hpp"

using namespace tramsim;

namespace {

BrakeQuery query(double v0) {
  BrakeQuery q;
  q.v0 = v0;
  q.params = TramParams::tatra_t3();
  return q;
}

}  // namespace

TEST(Kinematic, Formula) {
  EXPECT_NEAR(predict_kinematic(15.0, 1.55), 225.0 / 3.1, 1e-12);
  EXPECT_DOUBLE_EQ(predict_kinematic(0.0, 1.55), 0.0);
  EXPECT_THROW(predict_kinematic(10.0, 0.0), ParameterError);
  EXPECT_THROW(predict_kinematic(-1.0, 1.55), ParameterError);
}

TEST(Model, ZeroSpeedIsZeroDistance) {
  const BrakeResult r = predict_model(query(0.0));
  EXPECT_DOUBLE_EQ(r.braking_distance, 0.0);
  EXPECT_DOUBLE_EQ(r.stop_time, 0.0);
}

TEST(Model, EmptyDryMatchesTableScale) {
  const BrakeResult r = predict_model(query(15.0));
  EXPECT_GT(r.braking_distance, predict_kinematic(15.0, 1.55));
  EXPECT_NEAR(r.braking_distance, 76.6, 1.0);
}

TEST(Model, MonotoneInSpeed) {
  double previous = 0.0;
  for (double v = 1.0; v <= 20.0; v += 1.0) {
    const double d = predict_model(query(v)).braking_distance;
    EXPECT_GT(d, previous);
    previous = d;
  }
}

TEST(Model, WeakerNotchBrakesLonger) {
  BrakeQuery q = query(10.0);
  const double full = predict_model(q).braking_distance;
  q.notch = Notch(-3);
  EXPECT_GT(predict_model(q).braking_distance, full);
}

TEST(Model, IdleCoastStopsOnLevel) {
  BrakeQuery q = query(5.0);
  q.notch = Notch::idle();
  const BrakeResult r = predict_model(q);
  EXPECT_GT(r.braking_distance, predict_model(query(5.0)).braking_distance);
}

TEST(Model, NonStoppingScenarioReported) {
  BrakeQuery q = query(10.0);
  q.notch = Notch::idle();
  q.slope = -0.03;
  EXPECT_THROW(predict_model(q), NonStoppingError);
}

TEST(Model, TractionNotchRejected) {
  BrakeQuery q = query(10.0);
  q.notch = Notch(2);
  EXPECT_THROW(predict_model(q), ParameterError);
}

TEST(Model, LevelTrackEqualsLevelConstant) {
  const TrackMap flat({{50.0, 14.0, 0.0}, {50.01, 14.0, 0.0}});
  BrakeQuery q = query(12.0);
  const double constant = predict_model(q).braking_distance;
  q.slope = TrackSlope{&flat, 100.0};
  EXPECT_NEAR(predict_model(q).braking_distance, constant, 1e-9);
}

TEST(Model, TrackSlopeFollowsChainage) {
  // Downhill ahead of the start point lengthens braking.
  const TrackMap map({{50.0, 14.0, 0.0}, {50.001, 14.0, -0.04}, {50.01, 14.0, -0.04}});
  BrakeQuery q = query(12.0);
  const double level = predict_model(q).braking_distance;
  q.slope = TrackSlope{&map, 120.0};
  EXPECT_GT(predict_model(q).braking_distance, level);
  q.slope = TrackSlope{nullptr, 0.0};
  EXPECT_THROW(predict_model(q), ParameterError);
}

TEST(Model, TrajectoryKeptOnRequest) {
  BrakeQuery q = query(8.0);
  q.keep_trajectory = true;
  const BrakeResult r = predict_model(q);
  ASSERT_TRUE(r.trajectory.has_value());
  EXPECT_DOUBLE_EQ(r.trajectory->back().state.v, 0.0);
  EXPECT_NEAR(r.trajectory->back().state.x, r.braking_distance, 1e-12);
  EXPECT_GT(r.trajectory->samples.size(), 1000u);
}

TEST(Scenarios, StandardSet) {
  const auto s = standard_brake_scenarios();
  ASSERT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(s[0].params.total_mass(), 17000.0);
  EXPECT_DOUBLE_EQ(s[1].params.total_mass(), 25000.0);
  EXPECT_DOUBLE_EQ(std::get<double>(s[2].slope), -0.035);
  EXPECT_EQ(s[3].adhesion.label, "wet");
  for (const auto& q : s) EXPECT_EQ(q.notch.value(), -7);
}

TEST(Compare, TableShapeAndCsv) {
  const auto table = compare_methods({5.0, 10.0}, standard_brake_scenarios(), 1.55);
  ASSERT_EQ(table.model.size(), 4u);
  ASSERT_EQ(table.model[0].size(), 2u);
  std::ostringstream out;
  write_comparison(out, table);
  const std::string csv = out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "v0,kinematic,empty_dry,loaded_dry,descent_dry,empty_wet");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Compare, GridMustAscend) {
  EXPECT_THROW(compare_methods({}, standard_brake_scenarios(), 1.55), ParameterError);
  EXPECT_THROW(compare_methods({10.0, 5.0}, standard_brake_scenarios(), 1.55), ParameterError);
}
