#pragma once

#include "force/cg.hpp"
#include "force/checkpoint.hpp"
#include "force/degrade.hpp"
#include "force/denoiser.hpp"
#include "force/errors.hpp"
#include "force/fbp.hpp"
#include "force/geometry.hpp"
#include "force/image.hpp"
#include "force/io.hpp"
#include "force/mar.hpp"
#include "force/metrics.hpp"
#include "force/parallel.hpp"
#include "force/pfgm.hpp"
#include "force/phantom.hpp"
#include "force/phase_scan.hpp"
#include "force/projector.hpp"
#include "force/sampler.hpp"
#include "force/sart.hpp"
#include "force/schedule.hpp"
#include "force/toynet.hpp"
#include "force/tv.hpp"
