#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kgh/diagnostics.hpp"
#include "kgh/error.hpp"
#include "kgh/propagator.hpp"

namespace kgh {

// Snapshot read failures, one type per cause.
class SnapshotError : public Error {
 public:
  using Error::Error;
};
class SnapshotFormatError : public SnapshotError {  // bad magic, bad header fields, I/O
 public:
  using SnapshotError::SnapshotError;
};
class SnapshotVersionError : public SnapshotError {
 public:
  using SnapshotError::SnapshotError;
};
class SnapshotChecksumError : public SnapshotError {
 public:
  using SnapshotError::SnapshotError;
};
class SnapshotTruncatedError : public SnapshotError {
 public:
  using SnapshotError::SnapshotError;
};

inline constexpr std::uint16_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 28;  // before the crc32

enum class SnapshotRole : std::uint8_t { state = 0, asymptotic = 1, wave_operator = 2 };

struct Snapshot {
  PhaseState state;
  SnapshotRole role = SnapshotRole::state;
};

// "KGH1", u16 version, u8 n, u32 M, f64 extent, f64 time, u8 role, u32 crc32
// of the preceding 28 bytes; then (re, im) f64 pairs of u and then udot, all
// little-endian, row-major.
std::string serialize_snapshot(const PhaseState& state, SnapshotRole role = SnapshotRole::state);
Snapshot deserialize_snapshot(const std::string& bytes);

void write_snapshot(const PhaseState& state, const std::filesystem::path& path,
                    SnapshotRole role = SnapshotRole::state);
Snapshot read_snapshot(const std::filesystem::path& path);

// 17 significant digits; "inf", "-inf", "nan" for the non-finite values.
std::string format_double(double x);

// Header "t,<col>,..." then one row per time.
void write_csv(const DiagnosticsSeries& series, const std::filesystem::path& path);
std::string to_csv(const DiagnosticsSeries& series);

std::uint32_t crc32_of(const std::string& bytes);

// <base>/<YYYYmmdd-HHMMSS>-<command>[-k], created; k disambiguates collisions.
std::filesystem::path make_run_directory(const std::filesystem::path& base, const std::string& command);

}  // namespace kgh
