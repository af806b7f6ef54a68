#pragma once

#include "daboost/core.hpp"
#include "daboost/data.hpp"
#include "daboost/engines.hpp"
#include "daboost/eval.hpp"
#include "daboost/random.hpp"
#include "daboost/stump.hpp"
