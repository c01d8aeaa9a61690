#pragma once

// Umbrella header: reduced-word arithmetic in free products, transfinite
// word expressions, covering-space charts with coherent tree translates,
// and the whisker-topology image predicate.

#include "wedge/base.hpp"
#include "wedge/group.hpp"
#include "wedge/word.hpp"
#include "wedge/expr.hpp"
#include "wedge/cover.hpp"
#include "wedge/whisker.hpp"
