#pragma once

// Umbrella header for the whole toolkit.

#include "clfkit/augment.hpp"
#include "clfkit/dataset.hpp"
#include "clfkit/ensemble.hpp"
#include "clfkit/image.hpp"
#include "clfkit/json_io.hpp"
#include "clfkit/metrics.hpp"
#include "clfkit/model.hpp"
#include "clfkit/optim.hpp"
#include "clfkit/pnm.hpp"
#include "clfkit/rng.hpp"
#include "clfkit/snapshot_io.hpp"
#include "clfkit/trainer.hpp"
