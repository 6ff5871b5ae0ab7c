#pragma once

// Umbrella header for the full library.

#include "westervelt/analysis.hpp"
#include "westervelt/block_operator.hpp"
#include "westervelt/coefficient.hpp"
#include "westervelt/config.hpp"
#include "westervelt/domain.hpp"
#include "westervelt/eigenpairs.hpp"
#include "westervelt/errors.hpp"
#include "westervelt/evolution.hpp"
#include "westervelt/io.hpp"
#include "westervelt/laplacian.hpp"
#include "westervelt/norms.hpp"
#include "westervelt/params.hpp"
#include "westervelt/spectrum.hpp"
#include "westervelt/state.hpp"
