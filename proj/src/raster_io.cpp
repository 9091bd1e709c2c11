#include "vchange/raster_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>

#include "vchange/errors.hpp"

namespace vchange {

namespace {

constexpr uint32_t kMaxDim = 1u << 20;

void put_u32_le(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

uint32_t get_u32_le(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<uint8_t> encode_fr32(const FloatRaster& raster) {
    std::vector<uint8_t> out;
    out.reserve(12 + raster.values.size() * 4);
    out.push_back('F');
    out.push_back('R');
    out.push_back('3');
    out.push_back('2');
    put_u32_le(out, static_cast<uint32_t>(raster.width));
    put_u32_le(out, static_cast<uint32_t>(raster.height));
    for (float v : raster.values) put_u32_le(out, std::bit_cast<uint32_t>(v));
    return out;
}

FloatRaster decode_fr32(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 12) throw IoError("FR32: file too short for header");
    if (std::memcmp(bytes.data(), "FR32", 4) != 0) throw IoError("FR32: bad magic");
    const uint32_t w = get_u32_le(bytes.data() + 4);
    const uint32_t h = get_u32_le(bytes.data() + 8);
    if (w == 0 || h == 0 || w > kMaxDim || h > kMaxDim || static_cast<uint64_t>(w) * h > (1ull << 31))
        throw IoError("FR32: dimension overflow");
    const uint64_t payload = static_cast<uint64_t>(w) * h * 4;
    if (bytes.size() != 12 + payload)
        throw IoError("FR32: declared size does not match payload (truncated or trailing bytes)");
    std::vector<float> vals(static_cast<size_t>(w) * h);
    for (size_t i = 0; i < vals.size(); ++i) {
        const uint32_t u = get_u32_le(bytes.data() + 12 + i * 4);
        vals[i] = std::bit_cast<float>(u);
        if (std::isnan(vals[i])) throw IoError("FR32: NaN value rejected");
    }
    FloatRaster r;
    r.width = static_cast<int>(w);
    r.height = static_cast<int>(h);
    r.values = std::move(vals);
    return r;
}

namespace {

struct PngReadState {
    const uint8_t* data;
    size_t size;
    size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
    auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (st->pos + len > st->size) {
        png_error(png, "read past end of buffer");
        return;
    }
    std::memcpy(out, st->data + st->pos, len);
    st->pos += len;
}

void png_mem_write(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void png_mem_flush(png_structp) {}

// Decodes any PNG to 8-bit rows with the requested channel count (1 = gray,
// 3 = RGB), applying libpng transforms as needed.
std::vector<uint8_t> decode_png_channels(const std::vector<uint8_t>& bytes, int channels,
                                         int& width, int& height) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
        throw IoError("PNG: bad magic");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw InternalError("PNG: failed to create read struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw InternalError("PNG: failed to create info struct");
    }

    std::vector<uint8_t> pixels;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("PNG: decode failed (corrupt or truncated file)");
    }

    PngReadState state{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &state, png_mem_read);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    if (w == 0 || h == 0 || w > kMaxDim || h > kMaxDim) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("PNG: dimension overflow");
    }
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (channels == 1) {
        if (color_type == PNG_COLOR_TYPE_RGB || color_type == PNG_COLOR_TYPE_RGB_ALPHA ||
            color_type == PNG_COLOR_TYPE_PALETTE)
            png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    } else {
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png);
    }
    png_read_update_info(png, info);

    const size_t rowbytes = png_get_rowbytes(png, info);
    if (rowbytes != static_cast<size_t>(w) * channels) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("PNG: unsupported pixel layout");
    }

    pixels.resize(static_cast<size_t>(w) * h * channels);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = pixels.data() + static_cast<size_t>(y) * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    width = static_cast<int>(w);
    height = static_cast<int>(h);
    return pixels;
}

std::vector<uint8_t> encode_png_channels(const uint8_t* pixels, int width, int height,
                                         int channels) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw InternalError("PNG: failed to create write struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw InternalError("PNG: failed to create info struct");
    }

    std::vector<uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw InternalError("PNG: encode failed");
    }

    png_set_write_fn(png, &out, png_mem_write, png_mem_flush);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(pixels + static_cast<size_t>(y) * width * channels);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

}  // namespace

std::vector<uint8_t> encode_mask_png(const BinaryMask& mask) {
    std::vector<uint8_t> gray(mask.bits.size());
    for (size_t i = 0; i < mask.bits.size(); ++i) gray[i] = mask.bits[i] ? 255 : 0;
    return encode_png_channels(gray.data(), mask.width, mask.height, 1);
}

BinaryMask decode_mask_png(const std::vector<uint8_t>& bytes) {
    int w = 0, h = 0;
    const std::vector<uint8_t> gray = decode_png_channels(bytes, 1, w, h);
    BinaryMask mask(w, h);
    for (size_t i = 0; i < gray.size(); ++i) mask.bits[i] = gray[i] >= 128 ? 1 : 0;
    return mask;
}

std::vector<uint8_t> encode_rgb_png(const RgbImage& image) {
    return encode_png_channels(image.rgb.data(), image.width, image.height, 3);
}

RgbImage decode_rgb_png(const std::vector<uint8_t>& bytes) {
    int w = 0, h = 0;
    std::vector<uint8_t> pixels = decode_png_channels(bytes, 3, w, h);
    RgbImage img(w, h);
    img.rgb = std::move(pixels);
    return img;
}

DecodedRaster decode_raster(const std::vector<uint8_t>& bytes) {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), "FR32", 4) == 0)
        return decode_fr32(bytes);
    if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0)
        return decode_mask_png(bytes);
    throw IoError("decode_raster: unknown format (expected FR32 or PNG)");
}

std::vector<uint8_t> encode_raster(const DecodedRaster& raster) {
    if (std::holds_alternative<FloatRaster>(raster))
        return encode_fr32(std::get<FloatRaster>(raster));
    return encode_mask_png(std::get<BinaryMask>(raster));
}

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<uint8_t>& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::vector<uint8_t> bytes(text.begin(), text.end());
    write_file(path, bytes);
}

}  // namespace vchange
