#pragma once

#include "ctm/complexity.hpp"
#include "ctm/distribution.hpp"
#include "ctm/enumeration.hpp"
#include "ctm/measures.hpp"
#include "ctm/simulator.hpp"
#include "ctm/turing_machine.hpp"
#include "ctm/zenith.hpp"

namespace ctm {
inline constexpr const char* kVersion = "0.1.0";
}
