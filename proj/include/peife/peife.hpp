#ifndef PEIFE_PEIFE_HPP
#define PEIFE_PEIFE_HPP

// Parallel-in-time exponential integrator FEM for linear parabolic equations
// on rectangular boxes with homogeneous Dirichlet data. Spatial operators are
// diagonalized in the sine basis (DST-I), time stepping is exponential
// Runge-Kutta, and runs can be accelerated across time with Parareal.

#include "peife/eife.hpp"
#include "peife/exp_weights.hpp"
#include "peife/experiments.hpp"
#include "peife/fem.hpp"
#include "peife/grid.hpp"
#include "peife/parareal.hpp"
#include "peife/problems.hpp"
#include "peife/spectral.hpp"

#endif
