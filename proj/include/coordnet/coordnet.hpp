// Umbrella header.

#pragma once

#include "coordnet/types.hpp"
#include "coordnet/ingestion.hpp"
#include "coordnet/windowing.hpp"
#include "coordnet/coaction.hpp"
#include "coordnet/network.hpp"
#include "coordnet/hcc.hpp"
#include "coordnet/forensics.hpp"
#include "coordnet/synthgen.hpp"
#include "coordnet/io.hpp"
#include "coordnet/pipeline.hpp"
