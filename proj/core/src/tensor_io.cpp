#include "siattn/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace siattn {

namespace {

static_assert(std::numeric_limits<double>::is_iec559, "IEEE-754 doubles required");

constexpr char kMagic[4] = {'S', 'I', 'A', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
    unsigned char bytes[sizeof(T)];
    const auto raw = static_cast<std::uint64_t>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bytes[i] = static_cast<unsigned char>(raw >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
        throw std::runtime_error(std::string("read_tensor: truncated while reading ") + what);
    std::uint64_t raw = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        raw |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return static_cast<T>(raw);
}

}  // namespace

void write_tensor(const Tensor& tensor, std::ostream& out) {
    validate(tensor);
    out.write(kMagic, 4);
    put_le<std::uint32_t>(out, kVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.shape.size()));
    for (std::size_t dim : tensor.shape) put_le<std::uint64_t>(out, dim);
    std::vector<unsigned char> payload(tensor.data.size() * 8);
    for (std::size_t i = 0; i < tensor.data.size(); ++i) {
        const auto raw = std::bit_cast<std::uint64_t>(tensor.data[i]);
        for (std::size_t b = 0; b < 8; ++b)
            payload[8 * i + b] = static_cast<unsigned char>(raw >> (8 * b));
    }
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("write_tensor: stream write failed");
}

void write_tensor(const Tensor& tensor, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_tensor: cannot open " + path.string());
    write_tensor(tensor, out);
}

Tensor read_tensor(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("read_tensor: bad magic, not a SIAT tensor file");
    const auto version = get_le<std::uint32_t>(in, "version");
    if (version != kVersion)
        throw std::runtime_error("read_tensor: unsupported version " + std::to_string(version));
    const auto ndim = get_le<std::uint32_t>(in, "ndim");
    std::vector<std::size_t> shape(ndim);
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < ndim; ++i) {
        const auto dim = get_le<std::uint64_t>(in, "dims");
        if (dim == 0 || (dim > 0 && count > std::numeric_limits<std::size_t>::max() / dim))
            throw std::runtime_error("read_tensor: invalid dimensions");
        shape[i] = static_cast<std::size_t>(dim);
        count *= shape[i];
    }
    std::vector<unsigned char> payload(count * 8);
    if (!in.read(reinterpret_cast<char*>(payload.data()),
                 static_cast<std::streamsize>(payload.size())))
        throw std::runtime_error("read_tensor: truncated payload");
    std::vector<double> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t raw = 0;
        for (std::size_t b = 0; b < 8; ++b)
            raw |= static_cast<std::uint64_t>(payload[8 * i + b]) << (8 * b);
        data[i] = std::bit_cast<double>(raw);
    }
    // A well-formed file ends exactly after the payload.
    in.peek();
    if (!in.eof())
        throw std::runtime_error("read_tensor: trailing bytes after payload");
    return Tensor(std::move(shape), std::move(data));
}

Tensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_tensor: cannot open " + path.string());
    return read_tensor(in);
}

}  // namespace siattn
