#include <doctest.h>
#include "nlwave/solver.hpp"
