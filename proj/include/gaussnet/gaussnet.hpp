#ifndef GAUSSNET_GAUSSNET_HPP_
#define GAUSSNET_GAUSSNET_HPP_

#include "gaussnet/activation.hpp"
#include "gaussnet/bounds.hpp"
#include "gaussnet/config_io.hpp"
#include "gaussnet/distances.hpp"
#include "gaussnet/errors.hpp"
#include "gaussnet/gauss_moments.hpp"
#include "gaussnet/harness.hpp"
#include "gaussnet/matrix.hpp"
#include "gaussnet/model.hpp"
#include "gaussnet/parallel.hpp"
#include "gaussnet/poincare.hpp"
#include "gaussnet/quadrature.hpp"
#include "gaussnet/rng.hpp"
#include "gaussnet/sampler.hpp"
#include "gaussnet/spectra.hpp"

#endif // GAUSSNET_GAUSSNET_HPP_
