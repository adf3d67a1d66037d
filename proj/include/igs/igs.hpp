#pragma once

#include "igs/automaton.hpp"   // IWYU pragma: export
#include "igs/baselines.hpp"   // IWYU pragma: export
#include "igs/benchgen.hpp"    // IWYU pragma: export
#include "igs/error.hpp"       // IWYU pragma: export
#include "igs/mml.hpp"         // IWYU pragma: export
#include "igs/search.hpp"      // IWYU pragma: export
#include "igs/search_node.hpp" // IWYU pragma: export
#include "igs/serialize.hpp"   // IWYU pragma: export
