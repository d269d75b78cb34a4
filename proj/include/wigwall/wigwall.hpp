#pragma once

#include "wigwall/error.hpp"
#include "wigwall/phase_grid.hpp"
#include "wigwall/fft.hpp"
#include "wigwall/parallel.hpp"
#include "wigwall/wigner_transform.hpp"
#include "wigwall/free_evolution.hpp"
#include "wigwall/boundary_kernels.hpp"
#include "wigwall/convolution.hpp"
#include "wigwall/oracle.hpp"
#include "wigwall/field_io.hpp"
#include "wigwall/scenario.hpp"
