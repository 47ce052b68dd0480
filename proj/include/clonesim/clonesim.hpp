#pragma once

#include "clonesim/special_functions.hpp"
#include "clonesim/fock.hpp"
#include "clonesim/cloners.hpp"
#include "clonesim/analysis.hpp"
#include "clonesim/witness.hpp"
#include "clonesim/version.hpp"
