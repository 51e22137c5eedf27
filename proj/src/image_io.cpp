#include "crossinject/image_io.hpp"

#include "crossinject/error.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

#include <jpeglib.h>

namespace crossinject {

namespace {

enum class Format { Png, Jpeg };

Format sniff(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    unsigned char magic[8] = {};
    in.read(reinterpret_cast<char*>(magic), sizeof magic);
    if (in.gcount() >= 8 && png_sig_cmp(magic, 0, 8) == 0) return Format::Png;
    if (in.gcount() >= 3 && magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF) return Format::Jpeg;
    throw Error("unsupported image format: " + path.string());
}

struct PngImage {
    png_image img{};
    PngImage() { img.version = PNG_IMAGE_VERSION; }
    ~PngImage() { png_image_free(&img); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

struct Rgb8 {
    int height = 0;
    int width = 0;
    std::vector<unsigned char> bytes;
};

Rgb8 decode_png(const std::filesystem::path& path)
{
    PngImage p;
    if (!png_image_begin_read_from_file(&p.img, path.c_str()))
        throw Error("png decode failed for " + path.string() + ": " + p.img.message);
    p.img.format = PNG_FORMAT_RGB;
    p.img.flags = PNG_IMAGE_FLAG_FAST;
    Rgb8 out;
    out.height = static_cast<int>(p.img.height);
    out.width = static_cast<int>(p.img.width);
    out.bytes.resize(PNG_IMAGE_SIZE(p.img));
    if (!png_image_finish_read(&p.img, nullptr, out.bytes.data(), 0, nullptr))
        throw Error("png decode failed for " + path.string() + ": " + p.img.message);
    return out;
}

struct JpegErrorManager {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo)
{
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

// header_only leaves bytes empty.
Rgb8 decode_jpeg(const std::filesystem::path& path, bool header_only)
{
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
    if (!file) throw Error("cannot open " + path.string());

    jpeg_decompress_struct cinfo{};
    JpegErrorManager jerr{};
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    Rgb8 out;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw Error("jpeg decode failed for " + path.string() + ": " + jerr.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.get());
    jpeg_read_header(&cinfo, TRUE);
    out.height = static_cast<int>(cinfo.image_height);
    out.width = static_cast<int>(cinfo.image_width);
    if (!header_only) {
        cinfo.out_color_space = JCS_RGB;
        jpeg_start_decompress(&cinfo);
        const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
        out.bytes.resize(stride * cinfo.output_height);
        while (cinfo.output_scanline < cinfo.output_height) {
            JSAMPROW row = out.bytes.data() + stride * cinfo.output_scanline;
            jpeg_read_scanlines(&cinfo, &row, 1);
        }
        jpeg_finish_decompress(&cinfo);
    }
    jpeg_destroy_decompress(&cinfo);
    return out;
}

Rgb8 decode(const std::filesystem::path& path)
{
    return sniff(path) == Format::Png ? decode_png(path) : decode_jpeg(path, false);
}

}  // namespace

ImageDims read_dimensions(const std::filesystem::path& path)
{
    if (sniff(path) == Format::Png) {
        PngImage p;
        if (!png_image_begin_read_from_file(&p.img, path.c_str()))
            throw Error("png header read failed for " + path.string() + ": " + p.img.message);
        return {static_cast<int>(p.img.height), static_cast<int>(p.img.width)};
    }
    const Rgb8 hdr = decode_jpeg(path, true);
    return {hdr.height, hdr.width};
}

Image read_image(const std::filesystem::path& path)
{
    const Rgb8 raw = decode(path);
    Image img(raw.height, raw.width);
    auto& data = img.data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = raw.bytes[i] / 255.0;
    return img;
}

BinaryMask read_mask(const std::filesystem::path& path)
{
    const Rgb8 raw = decode(path);
    BinaryMask mask(raw.height, raw.width);
    auto& data = mask.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const unsigned char* px = &raw.bytes[i * 3];
        data[i] = (px[0] | px[1] | px[2]) ? 1 : 0;
    }
    return mask;
}

void write_png(const std::filesystem::path& path, const Image& img)
{
    std::vector<unsigned char> bytes(img.data().size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const double v = std::clamp(img.data()[i], 0.0, 1.0);
        bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    PngImage p;
    p.img.width = static_cast<png_uint_32>(img.width());
    p.img.height = static_cast<png_uint_32>(img.height());
    p.img.format = PNG_FORMAT_RGB;
    p.img.flags = PNG_IMAGE_FLAG_FAST;
    if (!png_image_write_to_file(&p.img, path.c_str(), 0, bytes.data(), 0, nullptr))
        throw Error("png encode failed for " + path.string() + ": " + p.img.message);
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask)
{
    std::vector<unsigned char> bytes(mask.data().size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.data()[i] ? 255 : 0;
    PngImage p;
    p.img.width = static_cast<png_uint_32>(mask.width());
    p.img.height = static_cast<png_uint_32>(mask.height());
    p.img.format = PNG_FORMAT_GRAY;
    p.img.flags = PNG_IMAGE_FLAG_FAST;
    if (!png_image_write_to_file(&p.img, path.c_str(), 0, bytes.data(), 0, nullptr))
        throw Error("png encode failed for " + path.string() + ": " + p.img.message);
}

}  // namespace crossinject
