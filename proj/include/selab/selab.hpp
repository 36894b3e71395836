#pragma once

#include "selab/cli.hpp"
#include "selab/common.hpp"
#include "selab/config.hpp"
#include "selab/energy.hpp"
#include "selab/expression.hpp"
#include "selab/grid.hpp"
#include "selab/homogenization.hpp"
#include "selab/measures.hpp"
#include "selab/operators.hpp"
#include "selab/potential.hpp"
#include "selab/quadrature.hpp"
#include "selab/singular_solver.hpp"
#include "selab/verify.hpp"
