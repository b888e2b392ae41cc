#pragma once

#include "agentrec/core/domain.hpp"

namespace testimg {

inline agentrec::core::ImageAttachment png() {
  return {{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A, 0, 0, 0, 13, 'I', 'H', 'D', 'R'},
          agentrec::core::MediaType::kPng,
          std::nullopt};
}

inline agentrec::core::ImageAttachment jpeg() {
  return {{0xFF, 0xD8, 0xFF, 0xE0, 0, 16, 'J', 'F', 'I', 'F'},
          agentrec::core::MediaType::kJpeg,
          std::nullopt};
}

inline agentrec::core::ImageAttachment webp() {
  return {{'R', 'I', 'F', 'F', 4, 0, 0, 0, 'W', 'E', 'B', 'P', 'V', 'P', '8', ' '},
          agentrec::core::MediaType::kWebp,
          std::nullopt};
}

}  // namespace testimg
