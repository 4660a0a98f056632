#pragma once

#include "fracpf/config.hpp"
#include "fracpf/diagnostics.hpp"
#include "fracpf/errors.hpp"
#include "fracpf/experiment.hpp"
#include "fracpf/fast_history.hpp"
#include "fracpf/field.hpp"
#include "fracpf/frac_kernels.hpp"
#include "fracpf/initial.hpp"
#include "fracpf/io.hpp"
#include "fracpf/quadrature.hpp"
#include "fracpf/random.hpp"
#include "fracpf/soe.hpp"
#include "fracpf/spectral_grid.hpp"
#include "fracpf/steppers.hpp"
#include "fracpf/time_mesh.hpp"
