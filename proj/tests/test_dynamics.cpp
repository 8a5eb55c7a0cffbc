#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "tramsim/dynamics.hpp"
#include "tramsim/integrator.hpp"

using namespace tramsim;

namespace {

double kinetic_energy(const DynState& s, const TramParams& p) {
  return 0.5 * p.total_mass() * s.v * s.v + 0.5 * p.wheel_inertia * s.omega * s.omega;
}

}  // namespace

TEST(Notch, RangeAndDirection) {
  EXPECT_THROW(Notch(8), ParameterError);
  EXPECT_THROW(Notch(-8), ParameterError);
  EXPECT_TRUE(Notch(-3).braking());
  EXPECT_TRUE(Notch(2).traction());
  EXPECT_FALSE(Notch::idle().braking() || Notch::idle().traction());
}

TEST(Adhesion, ZeroAtNoCreep) {
  EXPECT_DOUBLE_EQ(adhesion_coefficient(0.0, AdhesionParams::dry()), 0.0);
  EXPECT_DOUBLE_EQ(adhesion_coefficient(0.0, AdhesionParams::wet()), 0.0);
}

TEST(Adhesion, PeakMatchesGridSearch) {
  // Stationary point of c e^{-a v} - d e^{-b v} against a brute-force search.
  const auto adh = AdhesionParams::dry();
  double best_v = 0.0;
  double best_mu = -1.0;
  for (int i = 0; i <= 200000; ++i) {
    const double v = 10.0 * i / 200000.0;
    const double mu = adhesion_coefficient(v, adh);
    if (mu > best_mu) {
      best_mu = mu;
      best_v = v;
    }
  }
  const double analytic = std::log(adh.b * adh.d / (adh.a * adh.c)) / (adh.b - adh.a);
  EXPECT_NEAR(best_v, analytic, 1e-4);
  EXPECT_NEAR(best_mu, adhesion_coefficient(analytic, adh), 1e-9);
  EXPECT_GT(best_mu, adhesion_coefficient(best_v, AdhesionParams::wet()));
}

TEST(Adhesion, NegativeCreepBrakes) {
  // Negative creep gives braking adhesion of the opposite sign.
  EXPECT_LT(adhesion_coefficient(-0.5, AdhesionParams::dry()), 0.0);
}

TEST(Resistance, IdentifiedForm) {
  const ResistanceCoeffs c{};
  EXPECT_DOUBLE_EQ(propulsion_resistance(10.0, 17000.0, c), 0.0147 * 17000.0 + 125.83 * 10.0);
  EXPECT_THROW(propulsion_resistance(-1.0, 17000.0, c), ParameterError);
}

TEST(Resistance, LiteratureForms) {
  const double M = 20000.0;
  const double v = 8.0;
  EXPECT_NEAR(propulsion_resistance(v, M, ResistanceCoeffs::literature(ResistanceForm::passenger_bogie)),
              0.0147 * M + 2.18e-6 * M * v * v, 1e-9);
  EXPECT_NEAR(propulsion_resistance(v, M, ResistanceCoeffs::literature(ResistanceForm::electric_locomotive)),
              520.0 + 0.0065 * M + 3.6 * v + 3.888 * v * v, 1e-9);
  EXPECT_NEAR(propulsion_resistance(v, M, ResistanceCoeffs::literature(ResistanceForm::suburban_emu)),
              1.839 * std::sqrt(M) + 0.0036 * M * v + 4.329 * v * v, 1e-9);
}

TEST(Resistance, FormNamesRoundTrip) {
  for (auto form : {ResistanceForm::identified, ResistanceForm::quadratic, ResistanceForm::passenger_bogie,
                    ResistanceForm::electric_locomotive, ResistanceForm::suburban_emu}) {
    EXPECT_EQ(parse_resistance_form(to_string(form)), form);
  }
  EXPECT_THROW(parse_resistance_form("maglev"), ParameterError);
}

TEST(Resistance, IdentifiedRejectsQuadraticTerm) {
  ResistanceCoeffs c{};
  c.c = 1.0;
  EXPECT_THROW(c.validate(), ParameterError);
}

TEST(TramParams, Defaults) {
  const TramParams p = TramParams::tatra_t3();
  EXPECT_DOUBLE_EQ(p.total_mass(), 17000.0);
  EXPECT_DOUBLE_EQ(p.wheel_inertia, 0.5 * 195.0 * 0.325 * 0.325);
  EXPECT_DOUBLE_EQ(p.power_limit, 176000.0);
  EXPECT_NO_THROW(p.validate());
}

TEST(TramParams, TotalMassBelowCurbRejected) {
  EXPECT_THROW(TramParams::tatra_t3().with_total_mass(15000.0), ParameterError);
  EXPECT_DOUBLE_EQ(TramParams::tatra_t3().with_total_mass(25000.0).total_mass(), 25000.0);
}

TEST(Torque, NotchBranchAndPowerCap) {
  const TramParams p = TramParams::tatra_t3();
  EXPECT_DOUBLE_EQ(commanded_torque(Notch(7), 1.0, p), 7 * 1449.0);
  EXPECT_DOUBLE_EQ(commanded_torque(Notch(3), 0.0, p), 3 * 1449.0);
  const double omega = 40.0;
  EXPECT_NEAR(commanded_torque(Notch(7), omega, p), 176000.0 / omega, 1e-9);
  // Braking torque is not power-limited.
  EXPECT_DOUBLE_EQ(commanded_torque(Notch(-7), omega, p), -7 * 1176.0);
  EXPECT_DOUBLE_EQ(commanded_torque(Notch::idle(), omega, p), 0.0);
}

TEST(Torque, LagIsExactExponential) {
  const double dt = 0.02;
  EXPECT_NEAR(torque_lag_step(100.0, 1100.0, dt, 3.0), 100.0 + 1000.0 * (1.0 - std::exp(-0.06)), 1e-9);
  // Two half steps equal one full step.
  const double half = torque_lag_step(torque_lag_step(0.0, 500.0, dt / 2, 3.0), 500.0, dt / 2, 3.0);
  EXPECT_NEAR(half, torque_lag_step(0.0, 500.0, dt, 3.0), 1e-12);
  EXPECT_THROW(torque_lag_step(0.0, 1.0, 0.0, 3.0), ParameterError);
}

TEST(ForceBalance, RollingOnLevelDeceleratesByResistance) {
  const TramParams p = TramParams::tatra_t3();
  const DynState s = DynState::rolling(10.0, p);
  const DynRates r = force_balance(s, 0.0, p, AdhesionParams::dry());
  EXPECT_NEAR(r.v_dot, -(0.0147 * 17000.0 + 125.83 * 10.0) / 17000.0, 1e-12);
}

TEST(ForceBalance, StaticFrictionHoldsOnGentleSlope) {
  const TramParams p = TramParams::tatra_t3();
  const DynState rest{};
  // 17000 kg * 9.81 * sin(0.001) = 167 N < 0.0147 * 17000 = 250 N breakaway.
  EXPECT_DOUBLE_EQ(force_balance(rest, 0.001, p, AdhesionParams::dry()).v_dot, 0.0);
  EXPECT_DOUBLE_EQ(force_balance(rest, -0.001, p, AdhesionParams::dry()).v_dot, 0.0);
  EXPECT_GT(force_balance(rest, -0.01, p, AdhesionParams::dry()).v_dot, 0.0);
  EXPECT_LT(force_balance(rest, 0.01, p, AdhesionParams::dry()).v_dot, 0.0);
}

TEST(Step, RejectsBadStepSize) {
  const TramParams p = TramParams::tatra_t3();
  EXPECT_THROW(step(DynState{}, Notch::idle(), 0.0, p, AdhesionParams::dry(), 0.0), ParameterError);
  EXPECT_THROW(step(DynState{}, Notch::idle(), 0.0, p, AdhesionParams::dry(), 0.02), ParameterError);
  EXPECT_NO_THROW(step(DynState{}, Notch::idle(), 0.0, p, AdhesionParams::dry(), 0.01));
}

TEST(Step, NonFiniteStateReported) {
  const TramParams p = TramParams::tatra_t3();
  DynState s;
  s.v = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(step(s, Notch::idle(), 0.0, p, AdhesionParams::dry(), 1e-3), NumericalError);
}

TEST(Step, StandstillStaysAtRest) {
  const TramParams p = TramParams::tatra_t3();
  DynState s{};
  for (int i = 0; i < 1000; ++i) s = step(s, Notch::idle(), 0.0, p, AdhesionParams::dry(), 1e-3);
  EXPECT_DOUBLE_EQ(s.v, 0.0);
  EXPECT_DOUBLE_EQ(s.x, 0.0);
}

TEST(Step, CoastingNeverGainsEnergy) {
  const TramParams p = TramParams::tatra_t3();
  DynState s = DynState::rolling(12.0, p);
  double energy = kinetic_energy(s, p);
  for (int i = 0; i < 20000; ++i) {
    s = step(s, Notch::idle(), 0.0, p, AdhesionParams::dry(), 1e-3);
    const double e = kinetic_energy(s, p);
    ASSERT_LE(e, energy * (1.0 + 1e-12)) << "step " << i;
    energy = e;
  }
}

TEST(Rk4, FourthOrderOnExponential) {
  auto f = [](double, const StateVector<1>& y) { return StateVector<1>{-y[0]}; };
  auto solve = [&](double dt) {
    StateVector<1> y{1.0};
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < n; ++i) y = rk4_step(f, i * dt, y, dt);
    return std::abs(y[0] - std::exp(-1.0));
  };
  const double order = std::log2(solve(0.1) / solve(0.05));
  EXPECT_NEAR(order, 4.0, 0.1);
}

TEST(Schedule, Validation) {
  EXPECT_THROW(NotchSchedule(std::vector<NotchSchedule::Entry>{}), ParameterError);
  EXPECT_THROW(NotchSchedule({{1.0, Notch(1)}}), ParameterError);
  EXPECT_THROW(NotchSchedule({{0.0, Notch(1)}, {0.0, Notch(2)}}), ParameterError);
  const NotchSchedule s({{0.0, Notch(1)}, {2.0, Notch(-2)}});
  EXPECT_EQ(s.notch_at(1.999).value(), 1);
  EXPECT_EQ(s.notch_at(2.0).value(), -2);
  EXPECT_EQ(s.notch_at(100.0).value(), -2);
}

TEST(Simulate, Deterministic) {
  const TramParams p = TramParams::tatra_t3();
  const NotchSchedule s({{0.0, Notch(5)}, {8.0, Notch(-5)}});
  SimOptions o;
  o.t_end = 20.0;
  const Trajectory a = simulate(DynState{}, s, 0.0, p, AdhesionParams::dry(), o);
  const Trajectory b = simulate(DynState{}, s, 0.0, p, AdhesionParams::dry(), o);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    ASSERT_EQ(a.samples[i].state.x, b.samples[i].state.x);
    ASSERT_EQ(a.samples[i].state.omega, b.samples[i].state.omega);
  }
}

TEST(Simulate, StopsAtZeroCrossingWhenBraking) {
  const TramParams p = TramParams::tatra_t3();
  SimOptions o;
  o.t_end = 60.0;
  const Trajectory t = simulate(DynState::rolling(10.0, p), NotchSchedule::constant(Notch(-7)), 0.0, p,
                                AdhesionParams::dry(), o);
  EXPECT_TRUE(t.stopped);
  EXPECT_LT(t.end_time, 60.0);
  EXPECT_DOUBLE_EQ(t.back().state.v, 0.0);
  EXPECT_DOUBLE_EQ(t.back().state.omega, 0.0);
  for (const auto& s : t.samples) EXPECT_GE(s.state.v, 0.0);
}

TEST(Simulate, SampleIntervalThinsOutput) {
  const TramParams p = TramParams::tatra_t3();
  SimOptions o;
  o.t_end = 2.0;
  o.sample_interval = 0.1;
  const Trajectory t = simulate(DynState{}, NotchSchedule::constant(Notch(7)), 0.0, p,
                                AdhesionParams::dry(), o);
  EXPECT_EQ(t.samples.size(), 21u);
  EXPECT_NEAR(t.back().t, 2.0, 1e-9);
}

TEST(Simulate, HeavierTramAcceleratesSlower) {
  SimOptions o;
  o.t_end = 10.0;
  const auto light = TramParams::tatra_t3();
  const auto heavy = light.with_total_mass(25000.0);
  const auto run = [&](const TramParams& p) {
    return simulate(DynState{}, NotchSchedule::constant(Notch(7)), 0.0, p, AdhesionParams::dry(), o)
        .back()
        .state.v;
  };
  EXPECT_GT(run(light), run(heavy));
}

TEST(Simulate, IdleCoastReachesStandstill) {
  // Rigid-body solution of M v' = -(a0 M + b v): v hits zero at
  // t = ln(1 + v0 b / (a0 M)) / (b / M); wheel inertia adds ~0.6 %.
  const TramParams p = TramParams::tatra_t3();
  SimOptions o;
  o.t_end = 400.0;
  o.sample_interval = 1.0;
  o.halt_on_idle_stop = true;
  const Trajectory t = simulate(DynState::rolling(5.0, p), NotchSchedule::constant(Notch::idle()), 0.0, p,
                                AdhesionParams::dry(), o);
  const double k = 125.83 / 17000.0;
  const double expected = std::log(1.0 + 5.0 * 125.83 / (0.0147 * 17000.0)) / k;
  ASSERT_TRUE(t.stopped);
  EXPECT_NEAR(t.end_time, expected, 0.01 * expected);
}
