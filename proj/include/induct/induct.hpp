#pragma once

#include "induct/concept_model.hpp"
#include "induct/fit/fit.hpp"
#include "induct/fit/number_objective.hpp"
#include "induct/fit/platt_objective.hpp"
#include "induct/fit/shape_objective.hpp"
#include "induct/harness/config.hpp"
#include "induct/harness/number_experiment.hpp"
#include "induct/harness/online_experiment.hpp"
#include "induct/io.hpp"
#include "induct/likelihood.hpp"
#include "induct/posterior.hpp"
#include "induct/prior.hpp"
#include "induct/propose/propose.hpp"
