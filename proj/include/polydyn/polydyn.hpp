#ifndef POLYDYN_POLYDYN_HPP
#define POLYDYN_POLYDYN_HPP

// Umbrella header.

#include "bell.hpp"
#include "cli.hpp"
#include "complex_poly.hpp"
#include "equidist.hpp"
#include "errors.hpp"
#include "exact_int.hpp"
#include "io.hpp"
#include "jet.hpp"
#include "linearize.hpp"
#include "potential.hpp"
#include "rootfinder.hpp"
#include "util.hpp"

#endif
