#pragma once

#include "slicsim/spin_system.hpp"
#include "slicsim/spin_ops.hpp"
#include "slicsim/hamiltonian.hpp"
#include "slicsim/density_state.hpp"
#include "slicsim/sequence.hpp"
#include "slicsim/executor.hpp"
#include "slicsim/rate_model.hpp"
#include "slicsim/scan.hpp"
#include "slicsim/fit.hpp"
#include "slicsim/scan_curve.hpp"
#include "slicsim/curve_io.hpp"
#include "slicsim/sequence_json.hpp"
#include "slicsim/parallel.hpp"
