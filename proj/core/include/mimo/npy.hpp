#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

// Minimal NPY (NumPy .npy) reader/writer. Supports format versions 1.0 and
// 2.0, C-order arrays, and the integer/float dtypes used by label and
// probability volumes. Data is always held in host (little-endian) order.
namespace mimo::npy {

enum class DType { u8, u16, u32, u64, i8, i16, i32, i64, f32, f64 };

std::size_t dtype_size(DType dtype);
std::string dtype_descr(DType dtype);  // e.g. "<u2"

struct Array {
    std::vector<std::size_t> shape;
    DType dtype = DType::u8;
    std::vector<std::byte> data;

    std::size_t element_count() const;

    // Element-wise conversions; integer conversions reject negative values
    // when the target is unsigned.
    std::vector<double> to_double() const;
    std::vector<std::uint64_t> to_unsigned() const;
};

Array read(const std::filesystem::path& path);
Array parse(std::span<const std::byte> bytes);

std::vector<std::byte> serialize(std::span<const std::size_t> shape, DType dtype,
                                 std::span<const std::byte> data);
void write(const std::filesystem::path& path, std::span<const std::size_t> shape, DType dtype,
           std::span<const std::byte> data);

}  // namespace mimo::npy
