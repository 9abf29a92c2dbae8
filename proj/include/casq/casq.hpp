#pragma once

// Simulation and verification toolkit for a degenerate three-level cascade
// laser with an intracavity degenerate parametric amplifier, coupled to a
// squeezed vacuum reservoir through a single-port mirror.

#include "casq/commands.hpp"
#include "casq/config.hpp"
#include "casq/csv.hpp"
#include "casq/fock.hpp"
#include "casq/langevin.hpp"
#include "casq/minimize.hpp"
#include "casq/moment_ode.hpp"
#include "casq/spectra.hpp"
#include "casq/steady_state.hpp"
#include "casq/transform.hpp"
#include "casq/verification.hpp"
