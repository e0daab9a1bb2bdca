#pragma once

// Umbrella header for the gifdec library.

#include "gifdec/codec.hpp"
#include "gifdec/color.hpp"
#include "gifdec/decimate.hpp"
#include "gifdec/errors.hpp"
#include "gifdec/lzw.hpp"
#include "gifdec/metrics.hpp"
#include "gifdec/synth.hpp"
#include "gifdec/types.hpp"
