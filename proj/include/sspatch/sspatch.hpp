#pragma once

// Umbrella header for the supersonic-sonic patch solver library.

#include "sspatch/boundary.hpp"
#include "sspatch/config.hpp"
#include "sspatch/diagnostics.hpp"
#include "sspatch/gas.hpp"
#include "sspatch/holder.hpp"
#include "sspatch/inversion.hpp"
#include "sspatch/io.hpp"
#include "sspatch/march.hpp"
#include "sspatch/mesh.hpp"
#include "sspatch/numerics.hpp"
#include "sspatch/oracle.hpp"
#include "sspatch/pipeline.hpp"
#include "sspatch/verify.hpp"
