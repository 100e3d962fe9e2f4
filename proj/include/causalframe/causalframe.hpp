#pragma once

#include "causalframe/attribstats.hpp"
#include "causalframe/consensus.hpp"
#include "causalframe/corpus.hpp"
#include "causalframe/error.hpp"
#include "causalframe/metrics.hpp"
#include "causalframe/normal.hpp"
#include "causalframe/report.hpp"
#include "causalframe/spandec.hpp"
#include "causalframe/version.hpp"
