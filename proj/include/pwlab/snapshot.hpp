#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "pwlab/rational.hpp"
#include "pwlab/spectral_field.hpp"

namespace pwlab {

/// Field snapshot: one text header line, then little-endian (re, im) float64
/// pairs, component-major, modes row-major in FFT order.
///
///   PWLAB-SNAPSHOT 1 dim=2 points=64,64 periods=<p0>,<p1> components=2 complex=0 coords=xyz
///
/// Wave profiles use `coords=wz` and append `c=<m>/<n>`.
struct Snapshot {
  SpectralField field;
  std::optional<Rational> wave_speed;  // set for (w,z) profile files
};

void write_snapshot(std::ostream& out, const SpectralField& field,
                    std::optional<Rational> wave_speed = std::nullopt);
void write_snapshot(const std::filesystem::path& path, const SpectralField& field,
                    std::optional<Rational> wave_speed = std::nullopt);
/// Throws std::runtime_error on malformed headers or truncated payloads.
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace pwlab
