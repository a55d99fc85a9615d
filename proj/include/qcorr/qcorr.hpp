#pragma once

#include "qcorr/basis.hpp"
#include "qcorr/correlation.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/ising.hpp"
#include "qcorr/measure.hpp"
#include "qcorr/oracles.hpp"
#include "qcorr/parallel.hpp"
#include "qcorr/rng.hpp"
#include "qcorr/state.hpp"
#include "qcorr/state_io.hpp"
#include "qcorr/states.hpp"
#include "qcorr/tensor.hpp"
