#pragma once

// Umbrella header for the task-offloading optimizer.

#include "offload/evaluator.hpp"
#include "offload/experiments.hpp"
#include "offload/instance_io.hpp"
#include "offload/model.hpp"
#include "offload/oracle.hpp"
#include "offload/policies.hpp"
#include "offload/selection.hpp"
#include "offload/solver.hpp"
#include "offload/verification.hpp"
