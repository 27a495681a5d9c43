#pragma once

// Convenience umbrella: the whole library.

#include "gpwave/core.hpp"
#include "gpwave/fft.hpp"
#include "gpwave/field.hpp"
#include "gpwave/harness/config.hpp"
#include "gpwave/harness/io.hpp"
#include "gpwave/harness/run.hpp"
#include "gpwave/madelung.hpp"
#include "gpwave/spectral.hpp"
#include "gpwave/variational.hpp"
