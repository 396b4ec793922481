#pragma once

#include "ptstl/bitvector.hpp"
#include "ptstl/datagen.hpp"
#include "ptstl/enumeration.hpp"
#include "ptstl/error.hpp"
#include "ptstl/evaluator.hpp"
#include "ptstl/formula.hpp"
#include "ptstl/param_synthesis.hpp"
#include "ptstl/parametric.hpp"
#include "ptstl/parser.hpp"
#include "ptstl/synthesis.hpp"
#include "ptstl/trace.hpp"
