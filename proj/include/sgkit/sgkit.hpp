#pragma once

// Umbrella header.

#include "sgkit/block_vector.hpp"
#include "sgkit/covariance.hpp"
#include "sgkit/experiment.hpp"
#include "sgkit/fem.hpp"
#include "sgkit/gmres.hpp"
#include "sgkit/mean_solver.hpp"
#include "sgkit/mesh.hpp"
#include "sgkit/multi_index.hpp"
#include "sgkit/preconditioners.hpp"
#include "sgkit/quadrature.hpp"
#include "sgkit/random_field.hpp"
#include "sgkit/relaxation.hpp"
#include "sgkit/report.hpp"
#include "sgkit/sg_operator.hpp"
#include "sgkit/sparse.hpp"
#include "sgkit/triple_product.hpp"
