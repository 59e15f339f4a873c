#pragma once

#include "mzqfi/analysis.hpp"
#include "mzqfi/analytic.hpp"
#include "mzqfi/circuit.hpp"
#include "mzqfi/errors.hpp"
#include "mzqfi/estimate.hpp"
#include "mzqfi/fock.hpp"
#include "mzqfi/grid.hpp"
#include "mzqfi/linalg.hpp"
#include "mzqfi/parallel.hpp"
#include "mzqfi/rng.hpp"
#include "mzqfi/sld.hpp"
