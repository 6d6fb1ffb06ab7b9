#include "qmri/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace qmri {

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

DType dtype_of(const Tensor& t) {
  struct {
    DType operator()(const RealArray&) const { return DType::float64; }
    DType operator()(const ComplexArray&) const { return DType::complex128; }
    DType operator()(const BoolArray&) const { return DType::boolean; }
  } visitor;
  return std::visit(visitor, t);
}

const Shape& shape_of(const Tensor& t) {
  return std::visit([](const auto& a) -> const Shape& { return a.shape(); }, t);
}

namespace {

constexpr char kMagic[4] = {'Q', 'M', 'R', 'T'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

double get_f64(const std::uint8_t* p) { return std::bit_cast<double>(get_u64(p)); }

std::size_t element_bytes(DType d) {
  switch (d) {
    case DType::float64: return 8;
    case DType::complex128: return 16;
    case DType::boolean: return 1;
  }
  return 0;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  const Shape& shape = shape_of(t);
  if (shape.size() > 255) throw ShapeError("QMRT supports at most 255 dimensions");
  const DType dtype = dtype_of(t);

  std::vector<std::uint8_t> out;
  out.reserve(7 + 8 * shape.size() + element_bytes(dtype) * shape_volume(shape));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kQmrtVersion);
  out.push_back(static_cast<std::uint8_t>(dtype));
  out.push_back(static_cast<std::uint8_t>(shape.size()));
  for (std::size_t e : shape) put_u64(out, e);

  if (const auto* r = std::get_if<RealArray>(&t)) {
    for (double v : r->values()) put_f64(out, v);
  } else if (const auto* c = std::get_if<ComplexArray>(&t)) {
    for (const cplx& v : c->values()) {
      put_f64(out, v.real());
      put_f64(out, v.imag());
    }
  } else {
    for (std::uint8_t v : std::get<BoolArray>(t).values()) out.push_back(v ? 1 : 0);
  }
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 7) throw TruncationError("QMRT header truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad QMRT magic");
  if (bytes[4] != kQmrtVersion) {
    throw FormatError("unsupported QMRT version " + std::to_string(bytes[4]));
  }
  const std::uint8_t code = bytes[5];
  if (code < 0x01 || code > 0x03) throw FormatError("unknown QMRT dtype code " + std::to_string(code));
  const auto dtype = static_cast<DType>(code);
  const std::size_t ndim = bytes[6];

  std::size_t pos = 7;
  if (bytes.size() < pos + 8 * ndim) throw TruncationError("QMRT extents truncated");
  Shape shape(ndim);
  for (std::size_t i = 0; i < ndim; ++i, pos += 8) shape[i] = get_u64(bytes.data() + pos);

  const std::size_t count = shape_volume(shape);
  const std::size_t esize = element_bytes(dtype);
  const std::size_t available = bytes.size() - pos;
  if (count != 0 && available / esize < count) {
    throw TruncationError("QMRT payload truncated: expected " + std::to_string(count) + " values, found " +
                          std::to_string(available / esize));
  }
  if (available != count * esize) throw FormatError("QMRT payload has trailing bytes");

  const std::uint8_t* p = bytes.data() + pos;
  switch (dtype) {
    case DType::float64: {
      std::vector<double> v(count);
      for (std::size_t i = 0; i < count; ++i) v[i] = get_f64(p + 8 * i);
      return RealArray(std::move(shape), std::move(v));
    }
    case DType::complex128: {
      std::vector<cplx> v(count);
      for (std::size_t i = 0; i < count; ++i) v[i] = {get_f64(p + 16 * i), get_f64(p + 16 * i + 8)};
      return ComplexArray(std::move(shape), std::move(v));
    }
    case DType::boolean: {
      std::vector<std::uint8_t> v(p, p + count);
      for (std::uint8_t b : v) {
        if (b > 1) throw FormatError("QMRT boolean payload byte out of range");
      }
      return BoolArray(std::move(shape), std::move(v));
    }
  }
  throw FormatError("unreachable dtype");
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(t);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed for " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  try {
    return decode_tensor(bytes);
  } catch (const TruncationError& e) {
    throw TruncationError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

namespace {

template <class A>
A read_as(const std::filesystem::path& path, const char* name) {
  Tensor t = read_tensor(path);
  if (auto* a = std::get_if<A>(&t)) return std::move(*a);
  throw FormatError(path.string() + ": expected " + name + " tensor");
}

}  // namespace

RealArray read_real(const std::filesystem::path& path) { return read_as<RealArray>(path, "float64"); }
ComplexArray read_complex(const std::filesystem::path& path) { return read_as<ComplexArray>(path, "complex128"); }
BoolArray read_bool(const std::filesystem::path& path) { return read_as<BoolArray>(path, "bool"); }

}  // namespace qmri
