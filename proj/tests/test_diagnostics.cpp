#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "edem/diagnostics.hpp"
#include "edem/errors.hpp"
#include "edem/integrator.hpp"

using namespace edem;

TEST(Energy, RestAndMovingCube)
{
  const Mesh rest_mesh = build_box_lattice(Vec3(2, 2, 1), {2, 2, 1}, MaterialParams{1.0, 0.25, 1.0});
  const EnergyReport r = total_energy(rest_mesh, init_rest(rest_mesh));
  EXPECT_EQ(r.total, 0.0);
  EXPECT_EQ(r.kinetic_trans + r.kinetic_rot, 0.0);

  const Mesh m = build_box_lattice(Vec3(1, 1, 1), {1, 1, 1}, MaterialParams{1.0, 0.25, 2.0});
  StateArray s = init_rest(m);
  set_initial_velocity(m, s, Vec3(1, 0, 0), Vec3::Zero());
  EXPECT_NEAR(total_energy(m, s).kinetic_trans, 1.0, 1e-15);
}

TEST(Energy, OscillatorQuarterPeriodExchange)
{
  const MaterialParams mat{1.0, 0.0, 1.0};
  const Mesh mesh = build_box_lattice(Vec3(2, 1, 1), {2, 1, 1}, mat);
  StateArray s = init_rest(mesh);
  s[1].X.x() += 0.01;
  SolverParams params;
  const double omega = std::sqrt(2.0);
  const long quarter = 1000;
  params.dt = 0.5 * std::numbers::pi / omega / quarter;
  const LoadSet none;
  StepWorkspace ws;
  stagger_momenta(mesh, s, none, params.dt, 0.0, ws);
  const double t0_energy = total_energy(mesh, s, &ws.forces, params.dt).total;
  EXPECT_NEAR(t0_energy, 5e-5, 1e-18);
  for (long k = 0; k < quarter; ++k) {
    rattle_step(mesh, s, none, params, k * params.dt, ws);
  }
  const ForceField f = assemble(mesh, s, none, 0.0);
  const EnergyReport e = total_energy(mesh, s, &f, params.dt);
  EXPECT_LT(e.U_t, 1e-6 * t0_energy);
  EXPECT_NEAR(e.kinetic_trans, t0_energy, 1e-5 * t0_energy);
}

TEST(Momenta, RestUniformAndSpin)
{
  const MaterialParams mat{1.0, 0.25, 1.0};
  const Mesh m = build_box_lattice(Vec3(2, 1, 1), {2, 1, 1}, mat);
  StateArray s = init_rest(m);
  Momenta p = momenta(m, s);
  EXPECT_EQ(p.linear, Vec3::Zero());
  EXPECT_EQ(p.angular, Vec3::Zero());

  const Vec3 v(0.1, 0.2, -0.3);
  set_initial_velocity(m, s, v, Vec3::Zero());
  p = momenta(m, s);
  EXPECT_NEAR((p.linear - 2.0 * v).norm(), 0.0, 1e-15);
  Vec3 L = Vec3::Zero();
  for (Index k = 0; k < m.size(); ++k) {
    L += m.particles[k].X0.cross(m.particles[k].mass * v);
  }
  EXPECT_NEAR((p.angular - L).norm(), 0.0, 1e-15);

  const Mesh cube = build_box_lattice(Vec3(1, 2, 3), {1, 1, 1}, mat, BoxOptions{Vec3(-0.5, -1.0, -1.5)});
  StateArray c = init_rest(cube);
  set_initial_velocity(cube, c, Vec3::Zero(), Vec3(0.4, 0, 0));
  EXPECT_NEAR((momenta(cube, c).angular - Vec3(cube.particles[0].principal_inertia[0] * 0.4, 0, 0)).norm(), 0.0,
              1e-15);
}

TEST(RotationVector, Basics)
{
  EXPECT_EQ(rotation_vector(Mat3::Identity()), Vec3::Zero());
  const Vec3 z = rotation_vector(rotation_from_vector(Vec3(0, 0, 0.1)));
  EXPECT_NEAR((z - Vec3(0, 0, 0.1)).norm(), 0.0, 1e-12);
  const Vec3 a(0.01, -0.02, 0.005);
  const Vec3 b(-0.003, 0.01, 0.02);
  const Vec3 ab = rotation_vector(rotation_from_vector(a) * rotation_from_vector(b));
  EXPECT_LE((ab - a - b).norm(), a.norm() * b.norm());
  const Vec3 pi = rotation_vector(rotation_from_vector(Vec3(0, std::numbers::pi, 0)));
  EXPECT_NEAR(pi.norm(), std::numbers::pi, 1e-12);
  EXPECT_NEAR(std::abs(pi.y()), std::numbers::pi, 1e-12);
}

TEST(RotationVector, RoundTrip)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    Vec3 t(u(rng), u(rng), u(rng));
    t *= 0.999 * std::numbers::pi * std::abs(u(rng)) / t.norm();
    EXPECT_LE((rotation_vector(rotation_from_vector(t)) - t).norm(), 1e-10);
  }
}

TEST(ArrivalTime, SyntheticRampAndErrors)
{
  std::vector<double> t;
  std::vector<double> y;
  for (int k = 0; k <= 40; ++k) {
    t.push_back(0.05 * k);
    y.push_back(std::max(0.0, t.back() - 0.5));
  }
  // Max 1.5 at t = 2; half of it is reached at t = 1.25.
  EXPECT_NEAR(arrival_time(t, y, 0.5), 1.25, 1e-12);
  for (std::size_t k = 0; k < t.size(); ++k) {
    y[k] = std::clamp(2.0 * (t[k] - 0.5), 0.0, 1.0);
  }
  EXPECT_NEAR(arrival_time(t, y, 0.5), 0.75, 1e-12);
  std::vector<double> zero(t.size(), 0.0);
  EXPECT_THROW(arrival_time(t, zero, 0.5), MeasurementError);
  EXPECT_THROW(arrival_time(ProbeRecord{}, 0.5), MeasurementError);
}

TEST(ArrivalTime, RampCrossingAtOneSecond)
{
  ProbeRecord r;
  for (int k = 0; k <= 20; ++k) {
    r.t.push_back(0.1 * k);
    r.xi.push_back(Vec3(0.0, 0.5 * r.t.back(), 0.0));
  }
  EXPECT_NEAR(arrival_time(r, 0.5), 1.0, 1e-12);
}

TEST(ArrivalTime, PulseInLatticeTravelsAtBarSpeed)
{
  // A pulse along a chain of cubes with nu = 0 moves at sqrt(E / rho).
  const MaterialParams mat{1.0, 0.0, 1.0};
  const int n = 200;
  const Mesh mesh = build_box_lattice(Vec3(n, 1, 1), {n, 1, 1}, mat);
  LoadSet loads;
  loads.point_forces.push_back({0, Vec3(1e-3, 0, 0), TimeProfile{TimeProfile::Kind::ricker, 0.05, 30.0, 0.0}});
  SolverParams params;
  params.dt = suggest_dt(mesh, mat, 0.25);
  StateArray s = init_rest(mesh);
  StepWorkspace ws;
  std::vector<ProbeRecord> probes(2);
  probes[0].particle = 40;
  probes[1].particle = 120;
  const long steps = std::lround(150.0 / params.dt);
  for (long k = 0; k < steps; ++k) {
    for (auto& p : probes) {
      p.sample(mesh, s, k * params.dt);
    }
    rattle_step(mesh, s, loads, params, k * params.dt, ws);
  }
  const double c = 80.0 / (arrival_time(probes[1], 0.5) - arrival_time(probes[0], 0.5));
  EXPECT_NEAR(c, 1.0, 0.02);
}

TEST(ConvergenceSlope, PowerLaws)
{
  std::vector<std::pair<double, double>> sq;
  std::vector<std::pair<double, double>> lin;
  for (double h : {0.1, 0.05, 0.025, 0.0125}) {
    sq.emplace_back(h, 3.0 * h * h);
    lin.emplace_back(h, 0.7 * h);
  }
  EXPECT_NEAR(convergence_slope(sq), 2.0, 1e-12);
  EXPECT_NEAR(convergence_slope(lin), 1.0, 1e-12);
  std::vector<std::pair<double, double>> cant;
  for (int n : {16, 32, 64}) {
    cant.emplace_back(1.0 / n, n * std::asin(2.0 * std::numbers::pi / n) - 2.0 * std::numbers::pi);
  }
  EXPECT_NEAR(convergence_slope(cant), 2.0, 0.1);
}

TEST(ConvergenceSlope, RejectsBadInput)
{
  EXPECT_THROW(convergence_slope({{0.1, 1.0}, {0.05, 0.5}}), InputError);
  EXPECT_THROW(convergence_slope({{0.1, 1.0}, {0.05, 0.0}, {0.025, 0.1}}), InputError);
  EXPECT_THROW(convergence_slope({{-0.1, 1.0}, {0.05, 0.2}, {0.025, 0.1}}), InputError);
}

TEST(CurlConsistency, TranslationAndRotation)
{
  const MaterialParams mat{1.0, 0.25, 1.0};
  const Mesh m = build_box_lattice(Vec3(1, 1, 1), {4, 4, 4}, mat);
  StateArray s = init_rest(m);
  for (auto& p : s) {
    p.X += Vec3(0.01, 0.02, -0.03);
  }
  const auto none = [](const Vec3&) { return Vec3::Zero(); };
  EXPECT_EQ(curl_consistency(m, s, none), 0.0);

  const Vec3 theta0(1e-3, -2e-3, 5e-4);
  s = init_rest(m);
  for (Index p = 0; p < m.size(); ++p) {
    s[p].X += theta0.cross(m.particles[p].X0);
    s[p].Q = rotation_from_vector(theta0);
  }
  const auto curl = [&](const Vec3&) { return Vec3(2.0 * theta0); };
  EXPECT_LE(curl_consistency(m, s, curl), 1e-15);
}

TEST(FormatDouble, RoundTrips)
{
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}
