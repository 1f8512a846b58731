#include "mimo/npy.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mimo/atomic_file.hpp"
#include "mimo/error.hpp"

namespace mimo::npy {
namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicSize = 6;

struct DTypeInfo {
    DType dtype;
    char kind;
    std::size_t size;
};

constexpr DTypeInfo kDTypes[] = {
    {DType::u8, 'u', 1},  {DType::u16, 'u', 2}, {DType::u32, 'u', 4}, {DType::u64, 'u', 8},
    {DType::i8, 'i', 1},  {DType::i16, 'i', 2}, {DType::i32, 'i', 4}, {DType::i64, 'i', 8},
    {DType::f32, 'f', 4}, {DType::f64, 'f', 8},
};

const DTypeInfo& info(DType dtype) {
    for (const auto& entry : kDTypes)
        if (entry.dtype == dtype) return entry;
    throw Error("npy: unknown dtype");
}

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

// Value following 'key': in a python dict literal, up to the matching
// delimiter for tuples, quotes for strings, or the next comma otherwise.
std::string dict_value(const std::string& header, const std::string& key) {
    const std::string needle = "'" + key + "'";
    auto pos = header.find(needle);
    if (pos == std::string::npos) throw Error("npy: header lacks '" + key + "'");
    pos = header.find(':', pos + needle.size());
    if (pos == std::string::npos) throw Error("npy: malformed header near '" + key + "'");
    ++pos;
    while (pos < header.size() && header[pos] == ' ') ++pos;
    if (pos >= header.size()) throw Error("npy: malformed header near '" + key + "'");

    const char open = header[pos];
    if (open == '(') {
        const auto close = header.find(')', pos);
        if (close == std::string::npos) throw Error("npy: unterminated shape tuple");
        return header.substr(pos, close - pos + 1);
    }
    if (open == '\'' || open == '"') {
        const auto close = header.find(open, pos + 1);
        if (close == std::string::npos) throw Error("npy: unterminated string in header");
        return header.substr(pos + 1, close - pos - 1);
    }
    const auto end = header.find_first_of(",}", pos);
    return trim(std::string_view(header).substr(pos, end - pos));
}

std::vector<std::size_t> parse_shape(const std::string& tuple) {
    std::vector<std::size_t> shape;
    std::string inner = tuple.substr(1, tuple.size() - 2);
    std::stringstream stream(inner);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t value = 0;
        try {
            std::size_t used = 0;
            value = std::stoull(item, &used);
            if (used != item.size()) throw Error("");
        } catch (...) {
            throw Error("npy: bad shape entry '" + item + "'");
        }
        shape.push_back(value);
    }
    return shape;
}

std::pair<DType, bool> parse_descr(const std::string& descr) {
    if (descr.size() < 3) throw Error("npy: unsupported dtype '" + descr + "'");
    const char order = descr[0];
    const char kind = descr[1];
    std::size_t size = 0;
    try {
        size = std::stoul(descr.substr(2));
    } catch (...) {
        throw Error("npy: unsupported dtype '" + descr + "'");
    }
    bool swap = false;
    if (order == '>') {
        swap = size > 1;
    } else if (order != '<' && order != '|' && order != '=') {
        throw Error("npy: unsupported byte order in '" + descr + "'");
    }
    for (const auto& entry : kDTypes)
        if (entry.kind == kind && entry.size == size) return {entry.dtype, swap};
    throw Error("npy: unsupported dtype '" + descr + "'");
}

template <typename T>
T load(const std::byte* at) {
    T value;
    std::memcpy(&value, at, sizeof(T));
    return value;
}

template <typename Out, typename Fn>
std::vector<Out> convert(const Array& array, Fn&& cast) {
    const std::size_t count = array.element_count();
    std::vector<Out> out(count);
    const std::byte* base = array.data.data();
    const std::size_t width = dtype_size(array.dtype);
    for (std::size_t i = 0; i < count; ++i) {
        const std::byte* at = base + i * width;
        switch (array.dtype) {
            case DType::u8: out[i] = cast(load<std::uint8_t>(at)); break;
            case DType::u16: out[i] = cast(load<std::uint16_t>(at)); break;
            case DType::u32: out[i] = cast(load<std::uint32_t>(at)); break;
            case DType::u64: out[i] = cast(load<std::uint64_t>(at)); break;
            case DType::i8: out[i] = cast(load<std::int8_t>(at)); break;
            case DType::i16: out[i] = cast(load<std::int16_t>(at)); break;
            case DType::i32: out[i] = cast(load<std::int32_t>(at)); break;
            case DType::i64: out[i] = cast(load<std::int64_t>(at)); break;
            case DType::f32: out[i] = cast(load<float>(at)); break;
            case DType::f64: out[i] = cast(load<double>(at)); break;
        }
    }
    return out;
}

}  // namespace

std::size_t dtype_size(DType dtype) { return info(dtype).size; }

std::string dtype_descr(DType dtype) {
    const auto& entry = info(dtype);
    std::string descr;
    descr += entry.size == 1 ? '|' : '<';
    descr += entry.kind;
    descr += std::to_string(entry.size);
    return descr;
}

std::size_t Array::element_count() const {
    std::size_t count = 1;
    for (auto extent : shape) count *= extent;
    return count;
}

std::vector<double> Array::to_double() const {
    return convert<double>(*this, [](auto v) { return static_cast<double>(v); });
}

std::vector<std::uint64_t> Array::to_unsigned() const {
    std::size_t index = 0;
    return convert<std::uint64_t>(*this, [&index](auto v) -> std::uint64_t {
        using V = decltype(v);
        if constexpr (std::is_floating_point_v<V>) {
            if (!(v >= 0) || v != static_cast<V>(static_cast<std::uint64_t>(v)))
                throw Error("npy: non-integral value at element " + std::to_string(index));
        } else if constexpr (std::is_signed_v<V>) {
            if (v < 0) throw Error("npy: negative value " + std::to_string(v) + " at element " + std::to_string(index));
        }
        ++index;
        return static_cast<std::uint64_t>(v);
    });
}

Array parse(std::span<const std::byte> bytes) {
    if (bytes.size() < kMagicSize + 4 || std::memcmp(bytes.data(), kMagic, kMagicSize) != 0)
        throw Error("npy: missing magic string");
    const auto major = static_cast<unsigned>(bytes[6]);
    std::size_t header_len = 0;
    std::size_t offset = 0;
    if (major == 1) {
        header_len = static_cast<std::size_t>(bytes[8]) | (static_cast<std::size_t>(bytes[9]) << 8);
        offset = 10;
    } else if (major == 2 || major == 3) {
        if (bytes.size() < 12) throw Error("npy: truncated header");
        header_len = 0;
        for (int b = 0; b < 4; ++b) header_len |= static_cast<std::size_t>(bytes[8 + b]) << (8 * b);
        offset = 12;
    } else {
        throw Error("npy: unsupported format version " + std::to_string(major));
    }
    if (bytes.size() < offset + header_len) throw Error("npy: truncated header");

    const std::string header(reinterpret_cast<const char*>(bytes.data() + offset), header_len);
    if (dict_value(header, "fortran_order") != "False") throw Error("npy: Fortran-order arrays are not supported");

    Array array;
    auto [dtype, swap] = parse_descr(dict_value(header, "descr"));
    array.dtype = dtype;
    array.shape = parse_shape(dict_value(header, "shape"));

    const std::size_t payload = array.element_count() * dtype_size(dtype);
    const std::size_t start = offset + header_len;
    if (bytes.size() - start < payload)
        throw Error("npy: expected " + std::to_string(payload) + " data bytes, found " +
                    std::to_string(bytes.size() - start));
    array.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                      bytes.begin() + static_cast<std::ptrdiff_t>(start + payload));

    if (swap) {
        const std::size_t width = dtype_size(dtype);
        for (std::size_t i = 0; i < array.data.size(); i += width)
            std::reverse(array.data.begin() + static_cast<std::ptrdiff_t>(i),
                         array.data.begin() + static_cast<std::ptrdiff_t>(i + width));
    }
    return array;
}

Array read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse(std::as_bytes(std::span(raw)));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::vector<std::byte> serialize(std::span<const std::size_t> shape, DType dtype, std::span<const std::byte> data) {
    static_assert(std::endian::native == std::endian::little, "NPY writer assumes a little-endian host");

    std::size_t count = 1;
    for (auto extent : shape) count *= extent;
    if (count * dtype_size(dtype) != data.size()) throw Error("npy: data size does not match shape");

    std::string shape_text = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        shape_text += std::to_string(shape[i]);
        if (shape.size() == 1 || i + 1 < shape.size()) shape_text += ",";
        if (i + 1 < shape.size()) shape_text += " ";
    }
    shape_text += ")";
    std::string header = "{'descr': '" + dtype_descr(dtype) + "', 'fortran_order': False, 'shape': " + shape_text + ", }";

    // Version 1.0 when the header length fits in 16 bits.
    std::size_t prefix = 10;
    int major = 1;
    if (header.size() + 1 + 64 > 65535) {
        prefix = 12;
        major = 2;
    }
    const std::size_t unpadded = prefix + header.size() + 1;
    header.append((64 - unpadded % 64) % 64, ' ');
    header += '\n';

    std::vector<std::byte> out;
    out.reserve(prefix + header.size() + data.size());
    for (std::size_t i = 0; i < kMagicSize; ++i) out.push_back(static_cast<std::byte>(kMagic[i]));
    out.push_back(static_cast<std::byte>(major));
    out.push_back(std::byte{0});
    const std::size_t len = header.size();
    const std::size_t len_bytes = major == 1 ? 2 : 4;
    for (std::size_t b = 0; b < len_bytes; ++b) out.push_back(static_cast<std::byte>((len >> (8 * b)) & 0xff));
    for (char c : header) out.push_back(static_cast<std::byte>(c));
    out.insert(out.end(), data.begin(), data.end());
    return out;
}

void write(const std::filesystem::path& path, std::span<const std::size_t> shape, DType dtype,
           std::span<const std::byte> data) {
    const auto bytes = serialize(shape, dtype, data);
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace mimo::npy
