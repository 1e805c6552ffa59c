#pragma once

#include "cabledyn/errors.hpp"
#include "cabledyn/geometry.hpp"
#include "cabledyn/cable.hpp"
#include "cabledyn/auv.hpp"
#include "cabledyn/prescription.hpp"
#include "cabledyn/sim.hpp"
#include "cabledyn/parallel.hpp"
#include "cabledyn/analysis.hpp"
#include "cabledyn/spectral.hpp"
#include "cabledyn/identify.hpp"
#include "cabledyn/config.hpp"
#include "cabledyn/io.hpp"
#include "cabledyn/reports.hpp"
#include "cabledyn/commands.hpp"
