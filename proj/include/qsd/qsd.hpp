// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT

#pragma once

#include "qsd/linalg.hpp"
#include "qsd/random.hpp"
#include "qsd/scenario.hpp"
#include "qsd/decision.hpp"
#include "qsd/utility.hpp"
#include "qsd/transforms.hpp"
#include "qsd/solvers.hpp"
#include "qsd/io.hpp"
#include "qsd/fixtures.hpp"
