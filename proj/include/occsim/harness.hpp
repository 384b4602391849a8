#pragma once

#include "occsim/harness/ber.hpp"
#include "occsim/harness/config.hpp"
#include "occsim/harness/csv.hpp"
#include "occsim/harness/parallel.hpp"
#include "occsim/harness/scenarios.hpp"
#include "occsim/harness/throughput.hpp"
#include "occsim/harness/trace.hpp"
