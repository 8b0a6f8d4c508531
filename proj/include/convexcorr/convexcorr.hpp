#pragma once

#include "convexcorr/builtins.hpp"
#include "convexcorr/coercivity.hpp"
#include "convexcorr/convex_fn.hpp"
#include "convexcorr/correspondence.hpp"
#include "convexcorr/errors.hpp"
#include "convexcorr/norms.hpp"
#include "convexcorr/solvers.hpp"
#include "convexcorr/structured.hpp"
#include "convexcorr/subspace.hpp"
#include "convexcorr/version.hpp"
