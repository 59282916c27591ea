#include "roofpedia/image_io.hpp"

#include "roofpedia/errors.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <csetjmp>
#include <jpeglib.h>
#include <memory>

namespace roofpedia::image {

namespace fs = std::filesystem;

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
    return f;
}

template <class Image>
Image read_png(const fs::path& path, png_uint_32 format, int channels) {
    FilePtr f = open_file(path, "rb");
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_stdio(&img, f.get()))
        throw DataError("cannot decode PNG " + path.string() + ": " + img.message);
    img.format = format;
    Image out;
    out.width = static_cast<int>(img.width);
    out.height = static_cast<int>(img.height);
    out.pixels.resize(static_cast<std::size_t>(img.width) * img.height * channels);
    if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
        std::string msg = img.message;
        png_image_free(&img);
        throw DataError("cannot decode PNG " + path.string() + ": " + msg);
    }
    return out;
}

void write_png(const fs::path& path, int width, int height, png_uint_32 format, const std::uint8_t* data) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    FilePtr f = open_file(path, "wb");
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(width);
    img.height = static_cast<png_uint_32>(height);
    img.format = format;
    if (!png_image_write_to_stdio(&img, f.get(), 0, data, 0, nullptr))
        throw IoError("cannot write PNG " + path.string() + ": " + img.message);
    if (std::fflush(f.get()) != 0)
        throw IoError("cannot write PNG " + path.string());
}

struct JpegError {
    jpeg_error_mgr mgr;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

[[noreturn]] void on_jpeg_error(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegError*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

RgbImage read_jpeg(const fs::path& path) {
    FilePtr f = open_file(path, "rb");
    jpeg_decompress_struct cinfo;
    JpegError err;
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = on_jpeg_error;
    RgbImage out;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DataError("cannot decode JPEG " + path.string() + ": " + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, f.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    out.width = static_cast<int>(cinfo.output_width);
    out.height = static_cast<int>(cinfo.output_height);
    out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * out.width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return out;
}

} // namespace

GrayImage read_gray_png(const fs::path& path) { return read_png<GrayImage>(path, PNG_FORMAT_GRAY, 1); }

RgbImage read_rgb(const fs::path& path) {
    auto ext = path.extension().string();
    for (auto& c : ext)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".jpg" || ext == ".jpeg")
        return read_jpeg(path);
    return read_png<RgbImage>(path, PNG_FORMAT_RGB, 3);
}

void write_gray_png(const fs::path& path, const GrayImage& img) {
    write_png(path, img.width, img.height, PNG_FORMAT_GRAY, img.pixels.data());
}

void write_rgb_png(const fs::path& path, const RgbImage& img) {
    write_png(path, img.width, img.height, PNG_FORMAT_RGB, img.pixels.data());
}

raster::ProbabilityMask to_probability(const GrayImage& img, const tilegrid::TileId& tile) {
    raster::ProbabilityMask m{tile, img.width, img.height, std::vector<float>(img.pixels.size())};
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        m.values[i] = static_cast<float>(img.pixels[i]) / 255.0f;
    return m;
}

GrayImage from_probability(const raster::ProbabilityMask& m) {
    GrayImage img{m.width, m.height, std::vector<std::uint8_t>(m.values.size())};
    for (std::size_t i = 0; i < m.values.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(m.values[i], 0.0f, 1.0f) * 255.0f));
    return img;
}

GrayImage from_binary(const raster::BinaryMask& b) {
    GrayImage img{b.width, b.height, std::vector<std::uint8_t>(b.values.size())};
    for (std::size_t i = 0; i < b.values.size(); ++i)
        img.pixels[i] = b.values[i] ? 255 : 0;
    return img;
}

} // namespace roofpedia::image
