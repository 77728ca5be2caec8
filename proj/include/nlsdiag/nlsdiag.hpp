#pragma once

#include "nlsdiag/errors.hpp"
#include "nlsdiag/grid.hpp"
#include "nlsdiag/fft.hpp"
#include "nlsdiag/norms.hpp"
#include "nlsdiag/spectral.hpp"
#include "nlsdiag/fields.hpp"
#include "nlsdiag/solver.hpp"
#include "nlsdiag/fitting.hpp"
#include "nlsdiag/diagnostics.hpp"
#include "nlsdiag/theorem3.hpp"
#include "nlsdiag/config.hpp"
#include "nlsdiag/io.hpp"
#include "nlsdiag/scenarios.hpp"
