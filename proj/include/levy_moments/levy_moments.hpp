#pragma once

#include "levy_moments/asymptotics.hpp"
#include "levy_moments/closedform.hpp"
#include "levy_moments/criteria.hpp"
#include "levy_moments/error.hpp"
#include "levy_moments/json_io.hpp"
#include "levy_moments/model.hpp"
#include "levy_moments/model_json.hpp"
#include "levy_moments/montecarlo.hpp"
#include "levy_moments/quadrature.hpp"
#include "levy_moments/skeleton.hpp"
