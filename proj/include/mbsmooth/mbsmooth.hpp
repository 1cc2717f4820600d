#pragma once

#include "mbsmooth/backoff.hpp"
#include "mbsmooth/corpus_io.hpp"
#include "mbsmooth/errors.hpp"
#include "mbsmooth/eval.hpp"
#include "mbsmooth/instance.hpp"
#include "mbsmooth/metrics.hpp"
#include "mbsmooth/neighbors.hpp"
#include "mbsmooth/symbol.hpp"
#include "mbsmooth/weighting.hpp"
