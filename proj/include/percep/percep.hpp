// Copyright percep-hash contributors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include "percep/attacks.hpp"
#include "percep/dataset_io.hpp"
#include "percep/hashing.hpp"
#include "percep/imaging.hpp"
#include "percep/matchbench.hpp"
