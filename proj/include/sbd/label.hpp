#pragma once

#include <cstdint>

namespace sbd {

// Class convention everywhere, including logits and confusion counts:
// 0 = NO_SEG, 1 = SEG (the rare, positive class).
enum class Label : std::uint8_t { NoSeg = 0, Seg = 1 };

inline int label_index(Label l) { return l == Label::Seg ? 1 : 0; }

}  // namespace sbd
