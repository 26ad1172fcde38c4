#pragma once

#include "firesim/error.hpp"
#include "firesim/random.hpp"
#include "firesim/fields.hpp"
#include "firesim/pde.hpp"
#include "firesim/source_fit.hpp"
#include "firesim/simulator.hpp"
#include "firesim/scenario.hpp"
#include "firesim/metrics.hpp"
#include "firesim/kv.hpp"
#include "firesim/io.hpp"
#include "firesim/pipeline.hpp"
#include "firesim/array_api.hpp"
