#pragma once

#include "steinflow/core.hpp"
#include "steinflow/dynamics.hpp"
#include "steinflow/experiment.hpp"
#include "steinflow/geometry.hpp"
#include "steinflow/kernels.hpp"
#include "steinflow/linalg.hpp"
#include "steinflow/meanfield.hpp"
#include "steinflow/metrics.hpp"
#include "steinflow/targets.hpp"
