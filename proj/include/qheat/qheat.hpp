#pragma once

// Umbrella header.

#include "qheat/qcore.hpp"
#include "qheat/spectral.hpp"
#include "qheat/forward.hpp"
#include "qheat/inverse_source.hpp"
#include "qheat/inverse_initial.hpp"
#include "qheat/catalog.hpp"
#include "qheat/csv.hpp"
#include "qheat/config.hpp"
#include "qheat/cli.hpp"
