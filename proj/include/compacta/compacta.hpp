#pragma once

#include "compacta/csv.hpp"
#include "compacta/error.hpp"
#include "compacta/metrics.hpp"
#include "compacta/peaks.hpp"
#include "compacta/pipeline.hpp"
#include "compacta/slicing.hpp"
#include "compacta/standardization.hpp"
#include "compacta/types.hpp"
