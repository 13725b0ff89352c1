#pragma once

#include "normlab/errors.hpp"
#include "normlab/spectral.hpp"
#include "normlab/instance.hpp"
#include "normlab/catalog.hpp"
#include "normlab/sweep.hpp"
#include "normlab/derivation.hpp"
#include "normlab/search.hpp"
#include "normlab/io.hpp"
