#ifndef BDARMA_BDARMA_HPP
#define BDARMA_BDARMA_HPP

#include "bdarma/config.hpp"
#include "bdarma/csv.hpp"
#include "bdarma/design.hpp"
#include "bdarma/diagnostics.hpp"
#include "bdarma/dirichlet.hpp"
#include "bdarma/errors.hpp"
#include "bdarma/estimators.hpp"
#include "bdarma/forecast.hpp"
#include "bdarma/hmc.hpp"
#include "bdarma/lfo.hpp"
#include "bdarma/manifest.hpp"
#include "bdarma/math.hpp"
#include "bdarma/metrics.hpp"
#include "bdarma/model.hpp"
#include "bdarma/optimize.hpp"
#include "bdarma/posterior.hpp"
#include "bdarma/psis.hpp"
#include "bdarma/rng.hpp"
#include "bdarma/simplex.hpp"
#include "bdarma/spec_config.hpp"
#include "bdarma/study.hpp"
#include "bdarma/summary.hpp"
#include "bdarma/threading.hpp"
#include "bdarma/tvarma.hpp"

#endif
