#pragma once

#include "gspsim/auction.hpp"
#include "gspsim/csv.hpp"
#include "gspsim/distributions.hpp"
#include "gspsim/errors.hpp"
#include "gspsim/experiment.hpp"
#include "gspsim/manifest.hpp"
#include "gspsim/pollution.hpp"
#include "gspsim/rng.hpp"
#include "gspsim/sampling.hpp"
#include "gspsim/svg.hpp"
#include "gspsim/version.hpp"
