#pragma once

#include <string>

#include "semclip/model.hpp"

namespace semclip {

/// Binary model snapshot; fixed header plus named flat fp32 arrays in a fixed
/// order. See docs/checkpoint_format.md for the exact byte layout.
void save_checkpoint(const Model& m, const std::string& path);

/// Parses and validates a checkpoint. Malformed content raises
/// CheckpointError naming the byte offset of the failure.
Model load_checkpoint(const std::string& path);

}  // namespace semclip
