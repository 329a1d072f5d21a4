#pragma once

#include "bor/error.hpp"
#include "bor/exact_arith.hpp"
#include "bor/mdp.hpp"
#include "bor/bellman.hpp"
#include "bor/sign_abstraction.hpp"
#include "bor/planar.hpp"
#include "bor/solver.hpp"
#include "bor/io.hpp"
