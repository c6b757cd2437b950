#include "kgh/io.hpp"

#include <zlib.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

namespace kgh {

namespace {

constexpr char kMagic[4] = {'K', 'G', 'H', '1'};

template <typename T>
void put(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

template <typename T>
T get(const std::string& in, std::size_t& pos) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b)
    bits |= static_cast<U>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  pos += sizeof(T);
  return std::bit_cast<T>(bits);
}

}  // namespace

std::uint32_t crc32_of(const std::string& bytes) {
  uLong c = crc32(0L, Z_NULL, 0);
  c = crc32(c, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(c);
}

std::string serialize_snapshot(const PhaseState& state, SnapshotRole role) {
  const Grid& g = state.grid();
  const Field u = to_physical(state.u);
  const Field v = to_physical(state.udot);
  std::string out;
  out.reserve(kSnapshotHeaderBytes + 4 + 32 * g.size());
  out.append(kMagic, 4);
  put<std::uint16_t>(out, kSnapshotVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(g.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.points()));
  put<double>(out, g.extent());
  put<double>(out, state.time);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(role));
  put<std::uint32_t>(out, crc32_of(out));
  for (const Field* f : {&u, &v})
    for (std::size_t i = 0; i < f->size(); ++i) {
      put<double>(out, (*f)[i].real());
      put<double>(out, (*f)[i].imag());
    }
  return out;
}

Snapshot deserialize_snapshot(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw SnapshotFormatError("format: not a snapshot file (bad magic)");
  if (bytes.size() < kSnapshotHeaderBytes + 4) throw SnapshotTruncatedError("truncated header");
  std::size_t pos = 4;
  const auto version = get<std::uint16_t>(bytes, pos);
  if (version != kSnapshotVersion)
    throw SnapshotVersionError("snapshot version " + std::to_string(version) + ", expected " +
                               std::to_string(kSnapshotVersion));
  const auto n = get<std::uint8_t>(bytes, pos);
  const auto M = get<std::uint32_t>(bytes, pos);
  const auto extent = get<double>(bytes, pos);
  const auto time = get<double>(bytes, pos);
  const auto role = get<std::uint8_t>(bytes, pos);
  const auto stored = get<std::uint32_t>(bytes, pos);
  if (stored != crc32_of(bytes.substr(0, kSnapshotHeaderBytes))) throw SnapshotChecksumError("header checksum mismatch");
  if (role > 2) throw SnapshotFormatError("format: unknown role tag " + std::to_string(role));

  std::optional<Grid> grid;
  try {
    grid.emplace(n, extent, static_cast<int>(M));
  } catch (const Error& e) {
    throw SnapshotFormatError(std::string("format: bad grid in header: ") + e.what());
  }
  const std::size_t need = 32 * grid->size();
  const std::size_t have = bytes.size() - pos;
  if (have < need)
    throw SnapshotTruncatedError("truncated payload: " + std::to_string(have) + " of " + std::to_string(need) + " bytes");
  if (have > need) throw SnapshotFormatError("format: " + std::to_string(have - need) + " trailing bytes");

  Field u(*grid), v(*grid);
  for (Field* f : {&u, &v})
    for (std::size_t i = 0; i < f->size(); ++i) {
      const double re = get<double>(bytes, pos);
      const double im = get<double>(bytes, pos);
      (*f)[i] = cplx(re, im);
    }
  return Snapshot{PhaseState(std::move(u), std::move(v), time), static_cast<SnapshotRole>(role)};
}

void write_snapshot(const PhaseState& state, const std::filesystem::path& path, SnapshotRole role) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotFormatError("cannot open " + path.string() + " for writing");
  const std::string bytes = serialize_snapshot(state, role);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw SnapshotFormatError("write failed: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotFormatError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_snapshot(bytes);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const DiagnosticsSeries& series) {
  std::ostringstream out;
  out << "t";
  for (const auto& [name, values] : series.columns) {
    if (values.size() != series.times.size())
      throw ContractViolation("series column " + name + " does not match the time axis");
    out << ',' << name;
  }
  out << '\n';
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    out << format_double(series.times[i]);
    for (const auto& c : series.columns) out << ',' << format_double(c.second[i]);
    out << '\n';
  }
  return out.str();
}

void write_csv(const DiagnosticsSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << to_csv(series);
}

std::filesystem::path make_run_directory(const std::filesystem::path& base, const std::string& command) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  std::filesystem::create_directories(base);
  const std::string stem = std::string(stamp) + "-" + command;
  for (int k = 0;; ++k) {
    const auto dir = base / (k == 0 ? stem : stem + "-" + std::to_string(k));
    if (std::filesystem::create_directory(dir)) return dir;
  }
}

}  // namespace kgh
