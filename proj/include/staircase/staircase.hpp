#pragma once

#include "staircase/analysis.hpp"
#include "staircase/curve.hpp"
#include "staircase/exact_filter.hpp"
#include "staircase/itqde.hpp"
#include "staircase/model.hpp"
#include "staircase/sampling.hpp"
#include "staircase/smoothing.hpp"
