#pragma once

#include "makespan/bench.hpp"
#include "makespan/bounds.hpp"
#include "makespan/dist.hpp"
#include "makespan/error.hpp"
#include "makespan/io.hpp"
#include "makespan/network.hpp"
#include "makespan/oracle.hpp"
#include "makespan/point.hpp"
#include "makespan/rng.hpp"
#include "makespan/serialize.hpp"
#include "makespan/wbs.hpp"
