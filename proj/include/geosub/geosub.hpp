#pragma once

#include "geosub/analysis.hpp"
#include "geosub/errors.hpp"
#include "geosub/geometry.hpp"
#include "geosub/io.hpp"
#include "geosub/pyramid.hpp"
#include "geosub/refine.hpp"
#include "geosub/symbol.hpp"
