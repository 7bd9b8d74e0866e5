#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "biot/grid.hpp"
#include "biot/materials.hpp"

namespace biot::testing {

inline PoroInput rock(double K_b = 1e9, double K_s = 1e10) {
  PoroInput m;
  m.K_b = K_b;
  m.K_s = K_s;
  m.G = 0.6 * K_b;
  m.phi0 = 0.2;
  m.c = 4.4e-10;
  m.mu = 1e-3;
  m.permeability = {1e-13, 1e-13, 1e-13};
  m.rho0 = 1000.0;
  m.rho_r = 2650.0;
  m.eta = K_b;
  return m;
}

//! Random heterogeneous field with eta = factor * K_b.
inline std::vector<PoroInput> random_rocks(std::size_t n, std::mt19937_64& rng, double eta_factor = 2.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PoroInput> out(n);
  for (auto& m : out) {
    m = rock(0.5e9 * std::pow(10.0, u(rng)));
    const double k = 1e-15 * std::pow(100.0, u(rng));
    m.permeability = {k, k, k};
    m.eta = eta_factor * m.K_b;
  }
  return out;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace biot::testing
