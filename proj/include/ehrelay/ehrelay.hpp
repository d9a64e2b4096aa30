#pragma once

#include "ehrelay/analytic.hpp"
#include "ehrelay/experiments.hpp"
#include "ehrelay/model.hpp"
#include "ehrelay/montecarlo.hpp"
#include "ehrelay/optimize.hpp"
#include "ehrelay/snr.hpp"
#include "ehrelay/specfun.hpp"
#include "ehrelay/throughput.hpp"
