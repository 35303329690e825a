#pragma once

#include "compass/catalog.hpp"
#include "compass/compass.hpp"
#include "compass/danskin.hpp"
#include "compass/demos.hpp"
#include "compass/expr.hpp"
#include "compass/geometry.hpp"
#include "compass/hull.hpp"
#include "compass/io.hpp"
#include "compass/ode.hpp"
#include "compass/optimize.hpp"
