#pragma once

// Umbrella header for the entres library: exact entanglement-structure
// transformations on hypergraphs, obstruction bounds, and tensor network
// contraction over the rationals.

#include "constructions.hpp"
#include "contraction.hpp"
#include "hypergraph.hpp"
#include "io.hpp"
#include "matrix.hpp"
#include "numeric.hpp"
#include "obstructions.hpp"
#include "poly.hpp"
#include "rational.hpp"
#include "structure.hpp"
#include "tensor.hpp"
#include "util.hpp"
