#pragma once

#include "pucci/ball.hpp"
#include "pucci/check.hpp"
#include "pucci/critical.hpp"
#include "pucci/diagnostics.hpp"
#include "pucci/emden_fowler.hpp"
#include "pucci/error.hpp"
#include "pucci/integrator.hpp"
#include "pucci/io.hpp"
#include "pucci/parallel.hpp"
#include "pucci/params.hpp"
#include "pucci/quadrature.hpp"
#include "pucci/radial_operator.hpp"
