#pragma once

#include "har/activity.hpp"
#include "har/anova.hpp"
#include "har/dataset.hpp"
#include "har/error.hpp"
#include "har/evaluation.hpp"
#include "har/experiments.hpp"
#include "har/features.hpp"
#include "har/knn.hpp"
#include "har/metrics.hpp"
#include "har/pareto.hpp"
#include "har/report.hpp"
#include "har/search.hpp"
#include "har/segmentation.hpp"
#include "har/session.hpp"
#include "har/timing.hpp"
#include "har/util.hpp"
