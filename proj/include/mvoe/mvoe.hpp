#ifndef MVOE_MVOE_HPP
#define MVOE_MVOE_HPP

#include "mvoe/ellipsoid.hpp"
#include "mvoe/error.hpp"
#include "mvoe/linalg.hpp"
#include "mvoe/minkowski.hpp"
#include "mvoe/oracle.hpp"
#include "mvoe/reach.hpp"
#include "mvoe/scalar.hpp"

#endif  // MVOE_MVOE_HPP
