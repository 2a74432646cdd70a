#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sonavol {

enum class View { Top, Side };

/// Binary food silhouette, row-major, row 0 at the top of the image.
class FoodMask {
public:
    FoodMask() = default;
    FoodMask(int width, int height, View view = View::Top);
    /// Any nonzero byte in `bits` marks food.
    FoodMask(int width, int height, std::vector<std::uint8_t> bits, View view = View::Top);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    View view() const noexcept { return view_; }
    void set_view(View view) noexcept { view_ = view; }

    bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool food = true) { bits_[index(x, y)] = food ? 1 : 0; }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }

    /// Same dimensions and pixels; the view tag is not compared.
    bool same_pixels(const FoodMask& other) const noexcept;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    View view_ = View::Top;
    std::vector<std::uint8_t> bits_;
};

namespace mask_io {

/// 8-bit binary PGM (P5); nonzero pixels are food.
FoodMask read_pgm(const std::filesystem::path& path, View view);
void write_pgm(const std::filesystem::path& path, const FoodMask& mask);

/// Any PNG, converted to 8-bit grayscale; nonzero pixels are food.
FoodMask read_png(const std::filesystem::path& path, View view);

/// Dispatches on the file signature (P5 or PNG).
FoodMask read_mask(const std::filesystem::path& path, View view);

} // namespace mask_io

} // namespace sonavol
