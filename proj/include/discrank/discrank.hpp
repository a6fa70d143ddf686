#pragma once

#include "discrank/errors.hpp"
#include "discrank/numeric.hpp"
#include "discrank/lbfgs.hpp"
#include "discrank/payoff.hpp"
#include "discrank/games.hpp"
#include "discrank/geometry.hpp"
#include "discrank/fit_report.hpp"
#include "discrank/elo.hpp"
#include "discrank/disc.hpp"
#include "discrank/eval.hpp"
#include "discrank/io.hpp"
