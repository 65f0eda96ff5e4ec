#pragma once

#include "lantern/behaviors.hpp"

#include <string>

namespace lantern::wav {

/// Reads RIFF/WAVE with 16-bit PCM or 32-bit float samples, mixed down to mono.
behaviors::AudioClip load(const std::string& path);

void save(const std::string& path, const behaviors::AudioClip& clip);

}  // namespace lantern::wav
