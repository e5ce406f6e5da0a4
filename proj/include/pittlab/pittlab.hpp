#pragma once

#include "pittlab/error.hpp"
#include "pittlab/special.hpp"
#include "pittlab/quadrature.hpp"
#include "pittlab/kernels.hpp"
#include "pittlab/weights.hpp"
#include "pittlab/transforms.hpp"
#include "pittlab/conditions.hpp"
#include "pittlab/lab.hpp"
