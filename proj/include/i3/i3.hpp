#pragma once

#include "i3/analysis.hpp"
#include "i3/corpus.hpp"
#include "i3/csv.hpp"
#include "i3/error.hpp"
#include "i3/percentile.hpp"
#include "i3/report.hpp"
#include "i3/scheme.hpp"
#include "i3/stats.hpp"
