#pragma once

#include "drsplit/covlab.hpp"
#include "drsplit/engine.hpp"
#include "drsplit/error.hpp"
#include "drsplit/format.hpp"
#include "drsplit/hilbert.hpp"
#include "drsplit/io.hpp"
#include "drsplit/operator.hpp"
#include "drsplit/planner.hpp"
#include "drsplit/prox.hpp"
#include "drsplit/reformulation.hpp"
