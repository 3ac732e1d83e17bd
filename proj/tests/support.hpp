#pragma once

#include <random>

#include "spherebot/config.hpp"
#include "spherebot/model.hpp"

namespace spherebot::testing {

inline ModelParams nominal_params() {
  ModelParams p;
  p.m = 3.0;
  p.m_f = 1.0;
  p.m_s = 1.0;
  p.I_mp = 0.03;
  p.I_mr = 0.03;
  p.I_fp = 0.01;
  p.I_fr = 0.01;
  p.I_s = 0.03;
  p.I_sr = 0.03;
  p.R = 0.15;
  p.l = 0.10;
  p.zeta = 0.01;
  p.g = 9.81;
  return p;
}

inline Config default_config() { return load_config(SPHEREBOT_DEFAULT_CONFIG); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace spherebot::testing
