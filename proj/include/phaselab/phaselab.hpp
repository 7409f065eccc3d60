// phaselab.hpp — umbrella header.

#pragma once

#include "phaselab/angles.hpp"
#include "phaselab/berry.hpp"
#include "phaselab/cyclic.hpp"
#include "phaselab/errors.hpp"
#include "phaselab/evolution.hpp"
#include "phaselab/families.hpp"
#include "phaselab/optics.hpp"
#include "phaselab/quantum.hpp"
#include "phaselab/scenario.hpp"
#include "phaselab/sphere.hpp"
#include "phaselab/transport.hpp"
#include "phaselab/wilczek_zee.hpp"
