#pragma once

// Umbrella header.

#include "spinorbit/specfun.hpp"
#include "spinorbit/hansen.hpp"
#include "spinorbit/model.hpp"
#include "spinorbit/chebyshev.hpp"
#include "spinorbit/fasteval.hpp"
#include "spinorbit/strips.hpp"
#include "spinorbit/taylor.hpp"
#include "spinorbit/rk.hpp"
#include "spinorbit/integrators.hpp"
#include "spinorbit/capture.hpp"
#include "spinorbit/cpusec.hpp"
#include "spinorbit/montecarlo.hpp"
