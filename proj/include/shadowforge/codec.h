// Copyright 2026 The ShadowForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHADOWFORGE_CODEC_H_
#define SHADOWFORGE_CODEC_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "shadowforge/image.h"

namespace shadowforge {

enum class ImageFormat { kPng, kJpeg };

struct EncodeOptions {
  ImageFormat format = ImageFormat::kPng;
  int jpeg_quality = 90;  // [1, 100]; ignored for PNG
};

// Decodes a PNG or JPEG stream into 8-bit RGB. Grayscale and palette sources
// are expanded; sources with alpha are composited over opaque black.
// Throws DecodeError on malformed data and UnsupportedFormatError when the
// stream is neither PNG nor JPEG.
ImageBuffer decode_image(std::span<const std::uint8_t> bytes);

// PNG output is lossless. JPEG output only preserves dimensions.
std::vector<std::uint8_t> encode_image(const ImageBuffer& img,
                                       const EncodeOptions& options = {});

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);

ImageBuffer read_image_file(const std::filesystem::path& path);
void write_png_file(const std::filesystem::path& path, const ImageBuffer& img);

}  // namespace shadowforge

#endif  // SHADOWFORGE_CODEC_H_
