#ifndef ECOC_ECOC_HPP
#define ECOC_ECOC_HPP

#include "ecoc/bounds.hpp"
#include "ecoc/code_matrix.hpp"
#include "ecoc/error.hpp"
#include "ecoc/experiment_io.hpp"
#include "ecoc/figures.hpp"
#include "ecoc/fixtures.hpp"
#include "ecoc/prob_engine.hpp"
#include "ecoc/simulator.hpp"

#endif  // ECOC_ECOC_HPP
