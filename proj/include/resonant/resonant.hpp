#pragma once

#include "resonant/basis.hpp"
#include "resonant/bubble_dynamics.hpp"
#include "resonant/cr_resonance.hpp"
#include "resonant/dual.hpp"
#include "resonant/errors.hpp"
#include "resonant/ode.hpp"
#include "resonant/oscillator_ops.hpp"
#include "resonant/quadrature.hpp"
#include "resonant/radial_state.hpp"
#include "resonant/spectral_evolution.hpp"
