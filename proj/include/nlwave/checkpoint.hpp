#ifndef NLWAVE_CHECKPOINT_HPP
#define NLWAVE_CHECKPOINT_HPP

#include <string>

#include "nlwave/grid.hpp"

namespace nlwave {

// Binary checkpoint: magic "NLWV", u32 version = 1, u32 n, f64 h, f64 t,
// then two n^3 blocks of little-endian f64 (phi, pi), row-major, i fastest.
void write_checkpoint(const std::string& path, const Grid& g,
                      const FieldState& st);

struct Checkpoint {
  Grid grid;
  FieldState state;
};

Checkpoint read_checkpoint(const std::string& path);

}  // namespace nlwave

#endif
