// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "config.hpp"
#include "dynamics.hpp"
#include "ensemble.hpp"
#include "fields.hpp"
#include "grids.hpp"
#include "output.hpp"
#include "params.hpp"
#include "random.hpp"
#include "stats.hpp"
#include "vec3.hpp"
