#pragma once

#include "mscan/baselines.hpp"
#include "mscan/bench.hpp"
#include "mscan/generators.hpp"
#include "mscan/io.hpp"
#include "mscan/matrix.hpp"
#include "mscan/objective.hpp"
#include "mscan/parallel.hpp"
#include "mscan/random.hpp"
#include "mscan/scanners.hpp"
#include "mscan/svg.hpp"
#include "mscan/thresholds.hpp"
