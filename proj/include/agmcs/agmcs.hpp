#pragma once

#include "agmcs/checks.hpp"
#include "agmcs/gauge.hpp"
#include "agmcs/hunt.hpp"
#include "agmcs/io.hpp"
#include "agmcs/pipeline.hpp"
#include "agmcs/random.hpp"
#include "agmcs/sweep.hpp"
#include "agmcs/targets.hpp"
#include "agmcs/version.hpp"
