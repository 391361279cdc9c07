#pragma once

#include "qcommit/decision_tree.hpp"
#include "qcommit/estimator.hpp"
#include "qcommit/experiment.hpp"
#include "qcommit/graph.hpp"
#include "qcommit/heuristics.hpp"
#include "qcommit/io.hpp"
#include "qcommit/kidney.hpp"
#include "qcommit/matching.hpp"
#include "qcommit/sparse.hpp"
#include "qcommit/strategy.hpp"
#include "qcommit/structured.hpp"
