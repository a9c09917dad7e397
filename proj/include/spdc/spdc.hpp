#ifndef SPDC_SPDC_HPP
#define SPDC_SPDC_HPP

// Umbrella header.

#include "spdc/dispersion.hpp"
#include "spdc/entanglement.hpp"
#include "spdc/errors.hpp"
#include "spdc/fiberlink.hpp"
#include "spdc/phasematch.hpp"
#include "spdc/spectrum.hpp"
#include "spdc/sweep_io.hpp"
#include "spdc/version.hpp"

#endif
