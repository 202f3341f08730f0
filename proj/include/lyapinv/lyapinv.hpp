#pragma once

#include "errors.hpp"
#include "rng.hpp"
#include "linalg.hpp"
#include "montecarlo.hpp"
#include "grassmann.hpp"
#include "lyapunov.hpp"
#include "partition.hpp"
#include "jack.hpp"
#include "spherical.hpp"
#include "jchar.hpp"

namespace lyapinv {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lyapinv
