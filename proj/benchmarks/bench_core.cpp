#include <benchmark/benchmark.h>

#include "spherebot/control.hpp"
#include "spherebot/model.hpp"
#include "spherebot/mpc.hpp"
#include "spherebot/references.hpp"
#include "spherebot/simulator.hpp"

namespace spherebot {
namespace {

ModelParams nominal() {
  ModelParams p;
  p.m = 3.0;
  p.m_f = 1.0;
  p.m_s = 1.0;
  p.I_mp = p.I_mr = 0.03;
  p.I_fp = p.I_fr = 0.01;
  p.I_s = p.I_sr = 0.03;
  p.R = 0.15;
  p.l = 0.10;
  p.zeta = 0.01;
  p.g = 9.81;
  return p;
}

void BM_Rk4Step(benchmark::State& state) {
  const ModelParams p = nominal();
  SimState s;
  s.pitch = {0.1, 0.0, 0.2, 0.5};
  s.roll = {0.05, 0.1, 0.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rk4_step(p, s, 0.5, 0.2, 0.001));
  }
}
BENCHMARK(BM_Rk4Step);

void BM_HtsmcTorque(benchmark::State& state) {
  const ModelParams p = nominal();
  HtsmcGains g;
  g.a1 = 5.8;
  g.c1 = 5.8;
  g.p1 = 3;
  g.q1 = 5;
  g.a2 = 39.0;
  g.c2 = 0.38;
  g.p2 = 3;
  g.q2 = 5;
  g.A = 418.0;
  g.B = 3.7;
  g.k = 36.0;
  g.eps = 0.31;
  g.bl_width = 0.05;
  const RollState roll{0.05, 0.1, 0.3, -0.2};
  const PitchState pitch{0.02, 0.0, 0.0, 0.5};
  for (auto _ : state) {
    const RollStateSpaceTerms t =
        roll_state_space(p, roll, friction_estimate(p, pitch.x_dot, roll.q_r), pitch);
    benchmark::DoNotOptimize(htsmc_torque(g, t, roll, {0.17, 0.0, 0.0}, {0.07, 0.0, 0.0}));
  }
}
BENCHMARK(BM_HtsmcTorque);

void BM_SqpSolve(benchmark::State& state) {
  const TrajectoryRef ref = make_trajectory("lemniscate", 0.15);
  MpcConfig c;
  c.N = static_cast<int>(state.range(0));
  PlanarPose anchor = ref.at(20.0).pose;
  anchor.X += 0.05;
  anchor.Y -= 0.05;
  anchor.phi += 0.1;
  const NlpInstance nlp = build_problem(c, ref, anchor, {}, 20.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sqp_solve(nlp, {}));
  }
}
BENCHMARK(BM_SqpSolve)->Arg(2)->Arg(10)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace spherebot

BENCHMARK_MAIN();
