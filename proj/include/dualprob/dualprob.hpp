#pragma once

#include "dualprob/amplitude.hpp"
#include "dualprob/config.hpp"
#include "dualprob/errors.hpp"
#include "dualprob/event_space.hpp"
#include "dualprob/frequency.hpp"
#include "dualprob/run.hpp"
#include "dualprob/slit_sim.hpp"
