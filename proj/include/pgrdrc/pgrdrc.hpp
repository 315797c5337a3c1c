#pragma once

#include "pgrdrc/dataset.hpp"
#include "pgrdrc/density_model.hpp"
#include "pgrdrc/error.hpp"
#include "pgrdrc/featurize.hpp"
#include "pgrdrc/gaussianize.hpp"
#include "pgrdrc/layout.hpp"
#include "pgrdrc/metrics.hpp"
#include "pgrdrc/rng.hpp"
#include "pgrdrc/synthgen.hpp"
#include "pgrdrc/threshold.hpp"
