#pragma once

#include "campaign.hpp"
#include "generate.hpp"
#include "heuristics.hpp"
#include "lp.hpp"
#include "multiple_optimal.hpp"
#include "oracle.hpp"
#include "ratio.hpp"
#include "solution.hpp"
#include "tree.hpp"
#include "validate.hpp"
