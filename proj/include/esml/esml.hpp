#ifndef ESML_ESML_HPP
#define ESML_ESML_HPP

#include "esml/analysis.hpp"
#include "esml/config_io.hpp"
#include "esml/constraint.hpp"
#include "esml/copula.hpp"
#include "esml/copula_report.hpp"
#include "esml/diagnostics.hpp"
#include "esml/errors.hpp"
#include "esml/generator.hpp"
#include "esml/marginal.hpp"
#include "esml/movement.hpp"
#include "esml/normal.hpp"
#include "esml/quadrature.hpp"
#include "esml/rng.hpp"
#include "esml/simulate.hpp"
#include "esml/stats.hpp"
#include "esml/trace_io.hpp"
#include "esml/version.hpp"

#endif  // ESML_ESML_HPP
