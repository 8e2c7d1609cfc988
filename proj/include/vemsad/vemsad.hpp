#pragma once

#include "vemsad/core/error.hpp"
#include "vemsad/core/dual.hpp"
#include "vemsad/mesh/polygonal_mesh.hpp"
#include "vemsad/mesh/generators.hpp"
#include "vemsad/mesh/io.hpp"
#include "vemsad/poly/monomials.hpp"
#include "vemsad/poly/quadrature.hpp"
#include "vemsad/poly/vector_basis.hpp"
#include "vemsad/elasticity/local_space.hpp"
#include "vemsad/diffusion/local_space.hpp"
#include "vemsad/constitutive/laws.hpp"
#include "vemsad/solver/saddle.hpp"
#include "vemsad/solver/dof_map.hpp"
#include "vemsad/solver/assembly.hpp"
#include "vemsad/solver/norms.hpp"
#include "vemsad/solver/picard.hpp"
#include "vemsad/bench/manufactured.hpp"
#include "vemsad/bench/convergence.hpp"
#include "vemsad/bench/robustness.hpp"
#include "vemsad/bench/lithiation.hpp"
#include "vemsad/bench/export.hpp"
#include "vemsad/bench/config.hpp"
