#pragma once

#include <filesystem>

#include "hsi/datamodel.hpp"

/// File formats:
///
///  cube   "HSICUBE1 <H> <W> <B> f32le\n" followed by H·W·B little-endian IEEE-754 floats,
///         band-sequential (band 0 plane row-major, then band 1, ...).
///  labels "H W\n" then H lines of W space-separated non-negative integers (0 = unlabeled).
///  split  "H W\n", "seed <u64>\n", then H lines of W values in {0=Excluded, 1=Train, 2=Test}.
namespace hsi::io {

void write_cube(const HyperCube& cube, const std::filesystem::path& path);
HyperCube read_cube(const std::filesystem::path& path);

void write_labels(const LabelMap& labels, const std::filesystem::path& path);
LabelMap read_labels(const std::filesystem::path& path);

void write_split(const SplitMask& split, const std::filesystem::path& path);
/// The label map is needed to enforce the split's invariants on load.
SplitMask read_split(const std::filesystem::path& path, const LabelMap& labels);

/// CSV: header "y,x,f0,...,f{D-1}", one row per feature vector; values printed with
/// 17 significant digits so reading back is exact.
void write_features(const FeatureSet& features, const std::filesystem::path& path);
FeatureSet read_features(const std::filesystem::path& path, std::size_t height, std::size_t width);

}  // namespace hsi::io
