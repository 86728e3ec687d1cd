#pragma once

#include "core.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "integrals.hpp"
#include "io.hpp"
#include "ou.hpp"
#include "powercount.hpp"
#include "quadrature.hpp"
#include "rational.hpp"
#include "rng.hpp"
#include "spde.hpp"
#include "stats.hpp"
