// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "faa/ao_driver.hpp"
#include "faa/beamformer.hpp"
#include "faa/channel.hpp"
#include "faa/closed_form.hpp"
#include "faa/common.hpp"
#include "faa/geometry.hpp"
#include "faa/radiation.hpp"
#include "faa/rng.hpp"
#include "faa/secrecy.hpp"
#include "faa/shape_optimizer.hpp"
#include "faa/harness/config.hpp"
#include "faa/harness/csv.hpp"
#include "faa/harness/experiment.hpp"
#include "faa/harness/gradcheck.hpp"
#include "faa/harness/parallel.hpp"
#include "faa/harness/units.hpp"
