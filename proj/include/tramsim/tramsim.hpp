#pragma once

// Umbrella header for the tramsim library.

#include "tramsim/config.hpp"
#include "tramsim/csv.hpp"
#include "tramsim/dynamics.hpp"
#include "tramsim/dynamics_io.hpp"
#include "tramsim/error.hpp"
#include "tramsim/estimator.hpp"
#include "tramsim/filter.hpp"
#include "tramsim/ident.hpp"
#include "tramsim/integrator.hpp"
#include "tramsim/predictor.hpp"
#include "tramsim/synthetic.hpp"
#include "tramsim/telemetry.hpp"
#include "tramsim/track.hpp"
