#pragma once

#include "qinsure/error.hpp"
#include "qinsure/gate.hpp"
#include "qinsure/circuit.hpp"
#include "qinsure/state_vector.hpp"
#include "qinsure/distributions.hpp"
#include "qinsure/qft.hpp"
#include "qinsure/amplitude_estimation.hpp"
#include "qinsure/insurance.hpp"
#include "qinsure/transpile.hpp"
