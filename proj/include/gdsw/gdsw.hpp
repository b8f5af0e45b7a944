#pragma once

// Two-level GDSW overlapping Schwarz preconditioning toolkit.

#include "gdsw/backends.hpp"
#include "gdsw/coarse.hpp"
#include "gdsw/config.hpp"
#include "gdsw/eig.hpp"
#include "gdsw/error.hpp"
#include "gdsw/export.hpp"
#include "gdsw/grid.hpp"
#include "gdsw/harness.hpp"
#include "gdsw/krylov.hpp"
#include "gdsw/mmio.hpp"
#include "gdsw/partition.hpp"
#include "gdsw/precond.hpp"
#include "gdsw/problems.hpp"
#include "gdsw/sparse.hpp"
#include "gdsw/timing.hpp"
