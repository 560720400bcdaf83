#pragma once

#include "errors.hpp"
#include "jordan.hpp"
#include "regularization.hpp"
#include "trajectories.hpp"
#include "ode.hpp"
#include "dynamics.hpp"
#include "geometry.hpp"
