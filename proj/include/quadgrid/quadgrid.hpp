#pragma once

// Structured quadrilateral meshes honouring internal alignment curves,
// smoothed by a discrete inverted elliptic system.

#include "quadgrid/error.hpp"
#include "quadgrid/point.hpp"
#include "quadgrid/geometry.hpp"
#include "quadgrid/gridgen.hpp"
#include "quadgrid/smoothing.hpp"
#include "quadgrid/solvers.hpp"
#include "quadgrid/io.hpp"
#include "quadgrid/pipeline.hpp"
