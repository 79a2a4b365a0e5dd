#pragma once

#include "unitselect/adjustment.hpp"
#include "unitselect/benefit.hpp"
#include "unitselect/io.hpp"
#include "unitselect/model.hpp"
#include "unitselect/pns_bounds.hpp"
#include "unitselect/rng.hpp"
#include "unitselect/scm.hpp"
#include "unitselect/simulation.hpp"
