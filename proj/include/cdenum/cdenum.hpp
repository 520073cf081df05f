#pragma once

// Umbrella header: the whole library in dependency order.

#include "cdenum/common.hpp"
#include "cdenum/signature.hpp"
#include "cdenum/formula.hpp"
#include "cdenum/parser.hpp"
#include "cdenum/structure.hpp"
#include "cdenum/gaifman.hpp"
#include "cdenum/distance.hpp"
#include "cdenum/evaluator.hpp"
#include "cdenum/neighborhood.hpp"
#include "cdenum/decomposition.hpp"
#include "cdenum/enumeration.hpp"
#include "cdenum/generators.hpp"
#include "cdenum/cli.hpp"
