#pragma once

// Umbrella header for the multilayer filtration library.

#include "mlf/config.hpp"
#include "mlf/io.hpp"
#include "mlf/verification.hpp"
