#pragma once

// Umbrella header for the whole library.

#include "epirl/abm.hpp"
#include "epirl/bench.hpp"
#include "epirl/binomial.hpp"
#include "epirl/checkpoint.hpp"
#include "epirl/env.hpp"
#include "epirl/errors.hpp"
#include "epirl/io.hpp"
#include "epirl/mlp.hpp"
#include "epirl/ode.hpp"
#include "epirl/params.hpp"
#include "epirl/ppo.hpp"
#include "epirl/rng.hpp"
#include "epirl/suite.hpp"
#include "epirl/svg.hpp"
#include "epirl/train.hpp"
