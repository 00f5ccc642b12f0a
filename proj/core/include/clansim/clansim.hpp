#pragma once

#include "clansim/config_space.hpp"
#include "clansim/contours.hpp"
#include "clansim/coupling.hpp"
#include "clansim/errors.hpp"
#include "clansim/ffg_sampler.hpp"
#include "clansim/free_process.hpp"
#include "clansim/io.hpp"
#include "clansim/models.hpp"
#include "clansim/oracle.hpp"
#include "clansim/random.hpp"
