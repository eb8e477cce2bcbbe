#pragma once

#include "demobandit/agents.hpp"
#include "demobandit/bandit.hpp"
#include "demobandit/bootstrap.hpp"
#include "demobandit/bounds.hpp"
#include "demobandit/competence.hpp"
#include "demobandit/dataset_io.hpp"
#include "demobandit/experiment.hpp"
#include "demobandit/expert.hpp"
#include "demobandit/posterior.hpp"
#include "demobandit/rng.hpp"
