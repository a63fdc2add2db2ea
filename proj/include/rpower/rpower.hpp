#pragma once

#include "rpower/arith.hpp"
#include "rpower/baselines.hpp"
#include "rpower/bench.hpp"
#include "rpower/cubicfilter.hpp"
#include "rpower/instrument.hpp"
#include "rpower/lehman.hpp"
#include "rpower/modpoly.hpp"
#include "rpower/pstar.hpp"
#include "rpower/rootfind.hpp"
