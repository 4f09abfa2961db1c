#pragma once

#include "errors.hpp"
#include "precision.hpp"
#include "matrix.hpp"
#include "special_fn.hpp"
#include "maps.hpp"
#include "operator_matrix.hpp"
#include "eigensolver.hpp"
#include "validation.hpp"
#include "sweep.hpp"
