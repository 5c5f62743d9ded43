#pragma once

#include "common.hpp"
#include "nfa.hpp"
#include "cfg.hpp"
#include "transducer.hpp"
#include "counter.hpp"
#include "filters.hpp"
#include "reductions.hpp"
#include "intersection.hpp"
#include "engine.hpp"
#include "io.hpp"
