#include "sonavol/mask.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

namespace sonavol {

FoodMask::FoodMask(int width, int height, View view) : FoodMask(width, height, {}, view) {}

FoodMask::FoodMask(int width, int height, std::vector<std::uint8_t> bits, View view)
    : width_(width), height_(height), view_(view), bits_(std::move(bits)) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("mask dimensions must be positive");
    }
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bits_.empty()) {
        bits_.assign(n, 0);
    } else if (bits_.size() != n) {
        throw std::invalid_argument("mask pixel count does not match its dimensions");
    }
    for (auto& b : bits_) {
        b = b != 0 ? 1 : 0;
    }
}

std::size_t FoodMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool FoodMask::same_pixels(const FoodMask& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && bits_ == other.bits_;
}

namespace mask_io {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') {
                c = in.get();
            }
        } else if (std::isspace(c)) {
            if (!tok.empty()) {
                return tok;
            }
        } else {
            tok.push_back(static_cast<char>(c));
        }
        c = in.get();
    }
    return tok;
}

int pnm_int(std::istream& in, const std::filesystem::path& path) {
    const std::string tok = pnm_token(in);
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used == tok.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw std::runtime_error(path.string() + ": malformed PGM header");
}

} // namespace

FoodMask read_pgm(const std::filesystem::path& path, View view) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    if (pnm_token(in) != "P5") {
        throw std::runtime_error(path.string() + ": not a binary PGM (P5)");
    }
    const int width = pnm_int(in, path);
    const int height = pnm_int(in, path);
    const int maxval = pnm_int(in, path);
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
        throw std::runtime_error(path.string() + ": only 8-bit PGM masks are supported");
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    in.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
    if (static_cast<std::size_t>(in.gcount()) != bits.size()) {
        throw std::runtime_error(path.string() + ": truncated PGM data");
    }
    return FoodMask(width, height, std::move(bits), view);
}

void write_pgm(const std::filesystem::path& path, const FoodMask& mask) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
    std::vector<char> row(static_cast<std::size_t>(mask.width()));
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            row[static_cast<std::size_t>(x)] = static_cast<char>(mask.at(x, y) ? 255 : 0);
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

FoodMask read_png(const std::filesystem::path& path, View view) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
        throw std::runtime_error(path.string() + ": " + image.message);
    }
    image.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw std::runtime_error(path.string() + ": " + msg);
    }
    return FoodMask(static_cast<int>(image.width), static_cast<int>(image.height), std::move(pixels), view);
}

FoodMask read_mask(const std::filesystem::path& path, View view) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    char magic[8] = {};
    in.read(magic, sizeof magic);
    if (in.gcount() >= 2 && magic[0] == 'P' && magic[1] == '5') {
        return read_pgm(path, view);
    }
    if (in.gcount() == 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(magic), 0, 8) == 0) {
        return read_png(path, view);
    }
    throw std::runtime_error(path.string() + ": unrecognised mask format (expected P5 PGM or PNG)");
}

} // namespace mask_io

} // namespace sonavol
