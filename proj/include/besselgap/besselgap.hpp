#pragma once

#include "config.hpp"
#include "specfun.hpp"
#include "quadrature.hpp"
#include "contours.hpp"
#include "kernels.hpp"
#include "fredholm.hpp"
#include "painleve.hpp"
