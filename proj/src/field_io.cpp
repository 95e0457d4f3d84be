#include "needlets/field_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <unistd.h>

#include "needlets/error.hpp"

namespace needlets {

namespace {

constexpr char kMagic[6] = {'N', 'D', 'L', 'T', '1', '\0'};

void put_le(std::string& buf, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

BinaryRecord to_record(const FieldRealization& f) {
  BinaryRecord r;
  r.expansion = f.provenance.expansion;
  r.payload = Payload::field;
  r.seed = f.provenance.seed;
  if (f.grid.layout() == GridLayout::equirectangular) {
    r.dim0 = static_cast<std::uint32_t>(f.grid.n_theta());
    r.dim1 = static_cast<std::uint32_t>(f.grid.n_phi());
  }
  r.values = f.values;
  return r;
}

BinaryRecord to_record(const CoefficientVector& c) {
  BinaryRecord r;
  r.expansion = c.expansion;
  r.payload = Payload::coefficients;
  r.seed = c.seed;
  r.dim0 = static_cast<std::uint32_t>(c.truncation);
  r.values = c.values;
  return r;
}

void write_binary(std::ostream& out, const BinaryRecord& r) {
  std::string buf;
  buf.reserve(kBinaryHeaderSize + 8 * r.values.size());
  buf.append(kMagic, sizeof kMagic);
  buf.push_back(static_cast<char>(r.expansion));
  buf.push_back(static_cast<char>(r.payload));
  put_le(buf, r.values.size(), 8);
  put_le(buf, r.seed, 8);
  put_le(buf, r.dim0, 4);
  put_le(buf, r.dim1, 4);
  for (double v : r.values) put_le(buf, std::bit_cast<std::uint64_t>(v), 8);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

BinaryRecord read_binary(std::istream& in) {
  unsigned char h[kBinaryHeaderSize];
  in.read(reinterpret_cast<char*>(h), sizeof h);
  if (in.gcount() != static_cast<std::streamsize>(sizeof h)) throw ParseError("binary file shorter than header", 0);
  if (std::memcmp(h, kMagic, sizeof kMagic) != 0) throw ParseError("bad magic (expected NDLT1)", 0);
  if (h[6] > 1) throw ParseError("unknown expansion tag " + std::to_string(h[6]), 0);
  if (h[7] > 1) throw ParseError("unknown payload tag " + std::to_string(h[7]), 0);
  BinaryRecord r;
  r.expansion = static_cast<Expansion>(h[6]);
  r.payload = static_cast<Payload>(h[7]);
  const std::uint64_t count = get_le(h + 8, 8);
  r.seed = get_le(h + 16, 8);
  r.dim0 = static_cast<std::uint32_t>(get_le(h + 24, 4));
  r.dim1 = static_cast<std::uint32_t>(get_le(h + 28, 4));
  if (r.payload == Payload::field && r.dim0 != 0 && static_cast<std::uint64_t>(r.dim0) * r.dim1 != count) {
    throw ParseError("grid " + std::to_string(r.dim0) + "x" + std::to_string(r.dim1) + " does not match count", 0);
  }
  if (count > (std::uint64_t{1} << 40)) throw ParseError("implausible value count", 0);
  r.values.resize(count);
  unsigned char b[8];
  for (std::uint64_t i = 0; i < count; ++i) {
    in.read(reinterpret_cast<char*>(b), 8);
    if (in.gcount() != 8) throw ParseError("payload truncated after " + std::to_string(i) + " values", 0);
    r.values[i] = std::bit_cast<double>(get_le(b, 8));
  }
  return r;
}

void write_csv(std::ostream& out, std::span<const double> values) {
  out << "index,value\n";
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, values[i]);
    out << buf;
  }
}

std::vector<double> read_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> values;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "index,value") throw ParseError("expected header 'index,value'", lineno);
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected 'index,value'", lineno);
    // from_chars: locale-free, and subnormal values parse without a range error
    const char* first = line.data();
    const char* mid = first + comma;
    const char* last = first + line.size();
    unsigned long long idx = 0;
    double v = 0.0;
    const auto ri = std::from_chars(first, mid, idx);
    if (ri.ec != std::errc{} || ri.ptr != mid) throw ParseError("bad index", lineno);
    const auto rv = std::from_chars(mid + 1, last, v);
    if (rv.ec != std::errc{}) throw ParseError("unparseable number", lineno);
    if (rv.ptr != last) throw ParseError("trailing characters after value", lineno);
    if (idx != values.size()) throw ParseError("index " + std::to_string(idx) + " out of sequence", lineno);
    values.push_back(v);
  }
  if (!header) throw ParseError("empty CSV", 0);
  return values;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + path.string());
    }
  }
  fs::rename(tmp, path);
}

}  // namespace needlets
