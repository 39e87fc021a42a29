#pragma once

#include "qsynth/rng.hpp"
#include "qsynth/linalg.hpp"
#include "qsynth/euler.hpp"
#include "qsynth/circuit.hpp"
#include "qsynth/qasm.hpp"
#include "qsynth/io.hpp"
#include "qsynth/skeletons.hpp"
#include "qsynth/params.hpp"
#include "qsynth/optimizer.hpp"
#include "qsynth/experiment.hpp"
#include "qsynth/svg.hpp"
