#pragma once

#include "cloglin/causal.hpp"
#include "cloglin/effects.hpp"
#include "cloglin/errors.hpp"
#include "cloglin/hypothesis.hpp"
#include "cloglin/loglin_fit.hpp"
#include "cloglin/oracle.hpp"
#include "cloglin/report.hpp"
#include "cloglin/serialize.hpp"
#include "cloglin/table.hpp"
