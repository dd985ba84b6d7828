#ifndef FDRLAB_FDRLAB_HPP
#define FDRLAB_FDRLAB_HPP

#include "fdrlab/config.hpp"
#include "fdrlab/core.hpp"
#include "fdrlab/error.hpp"
#include "fdrlab/estimation.hpp"
#include "fdrlab/models.hpp"
#include "fdrlab/random.hpp"
#include "fdrlab/report.hpp"
#include "fdrlab/scenarios.hpp"

#endif // FDRLAB_FDRLAB_HPP
