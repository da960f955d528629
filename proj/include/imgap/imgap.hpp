#pragma once

#include "imgap/bounds.hpp"
#include "imgap/common.hpp"
#include "imgap/diffusion.hpp"
#include "imgap/gaps.hpp"
#include "imgap/graph.hpp"
#include "imgap/parallel.hpp"
#include "imgap/policies.hpp"
#include "imgap/realization.hpp"
#include "imgap/suite.hpp"
