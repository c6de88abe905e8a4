#pragma once

#include "rngsentinel/bitstream.hpp"
#include "rngsentinel/bitvec.hpp"
#include "rngsentinel/health_tests.hpp"
#include "rngsentinel/isn_entropy.hpp"
#include "rngsentinel/sensitivity.hpp"
#include "rngsentinel/series_monitor.hpp"
#include "rngsentinel/statkit.hpp"

namespace rngsentinel {

inline constexpr const char* version = "0.1.0";

} // namespace rngsentinel
