#pragma once

#include "interf/bounds.hpp"
#include "interf/edge_data.hpp"
#include "interf/graphs.hpp"
#include "interf/harness.hpp"
#include "interf/lifting.hpp"
#include "interf/model.hpp"
#include "interf/numerics.hpp"
#include "interf/random.hpp"
