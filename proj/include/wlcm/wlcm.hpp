#pragma once

#include "assignment.hpp"
#include "dataset.hpp"
#include "distribution.hpp"
#include "estimators.hpp"
#include "generators.hpp"
#include "kmeans.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "svd.hpp"
#include "types.hpp"
