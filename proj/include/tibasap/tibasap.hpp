#pragma once

#include "tibasap/bregman.hpp"
#include "tibasap/diagnostics.hpp"
#include "tibasap/error.hpp"
#include "tibasap/io.hpp"
#include "tibasap/problem.hpp"
#include "tibasap/problems/capped_l1.hpp"
#include "tibasap/problems/logreg.hpp"
#include "tibasap/problems/qp.hpp"
#include "tibasap/schedules.hpp"
#include "tibasap/solver.hpp"
#include "tibasap/types.hpp"
