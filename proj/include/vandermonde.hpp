#pragma once

#include "vandermonde/errors.hpp"
#include "vandermonde/partitions.hpp"
#include "vandermonde/jitter.hpp"
#include "vandermonde/constraints.hpp"
#include "vandermonde/qmc.hpp"
#include "vandermonde/parallel.hpp"
#include "vandermonde/integrate.hpp"
#include "vandermonde/marchenko_pastur.hpp"
#include "vandermonde/moments.hpp"
#include "vandermonde/ensemble.hpp"
#include "vandermonde/mse.hpp"
#include "vandermonde/oracle.hpp"
