#pragma once

#include "capacitance.hpp"
#include "constants.hpp"
#include "impedance.hpp"
#include "kummer.hpp"
#include "numerov.hpp"
#include "parabolic.hpp"
#include "presets.hpp"
#include "profile.hpp"
#include "spectrum.hpp"
