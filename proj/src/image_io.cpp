#include <png.h>

#include <bit>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "depthsr/dataio.hpp"

namespace depthsr {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// PFM

void write_pfm(const DepthMap& depth, const fs::path& path) {
    require_finite(depth, "write_pfm");
    std::string bytes = "Pf\n" + std::to_string(depth.width()) + " " +
                        std::to_string(depth.height()) + "\n-1.0\n";
    const std::size_t header = bytes.size();
    bytes.resize(header + depth.pixel_count() * 4);
    char* dst = bytes.data() + header;
    for (int y = depth.height() - 1; y >= 0; --y) {
        for (int x = 0; x < depth.width(); ++x) {
            const auto narrowed = static_cast<float>(depth.at(x, y));
            if (!std::isfinite(narrowed)) throw IoError("write_pfm: value exceeds float32 range");
            const auto bits = std::bit_cast<std::uint32_t>(narrowed);
            for (int b = 0; b < 4; ++b) *dst++ = static_cast<char>((bits >> (8 * b)) & 0xFFu);
        }
    }
    write_file(path, bytes);
}

namespace {

// Reads one whitespace-delimited header token; the token after the scale is
// followed by exactly one whitespace byte.
std::string header_token(const std::string& bytes, std::size_t& pos, const fs::path& path) {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos || pos >= bytes.size()) throw IoError("truncated PFM header in '" + path.string() + "'");
    return bytes.substr(start, pos - start);
}

int parse_dim(const std::string& token, const fs::path& path) {
    int v = 0;
    for (char c : token) {
        if (c < '0' || c > '9' || v > (1 << 24)) throw IoError("bad PFM dimension in '" + path.string() + "'");
        v = v * 10 + (c - '0');
    }
    if (v <= 0) throw IoError("bad PFM dimension in '" + path.string() + "'");
    return v;
}

}  // namespace

DepthMap read_pfm(const fs::path& path) {
    const std::string bytes = read_file(path);
    std::size_t pos = 0;
    const std::string magic = header_token(bytes, pos, path);
    if (magic == "PF") throw IoError("'" + path.string() + "' is a colour PFM; expected single channel");
    if (magic != "Pf") throw IoError("'" + path.string() + "' is not a PFM file");
    const int w = parse_dim(header_token(bytes, pos, path), path);
    const int h = parse_dim(header_token(bytes, pos, path), path);
    const std::string scale_token = header_token(bytes, pos, path);
    double scale = 0.0;
    try {
        std::size_t used = 0;
        scale = std::stod(scale_token, &used);
        if (used != scale_token.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw IoError("bad PFM scale in '" + path.string() + "'");
    }
    if (scale == 0.0 || !std::isfinite(scale)) throw IoError("bad PFM scale in '" + path.string() + "'");
    const bool little = scale < 0.0;
    ++pos;  // single whitespace byte before raster
    const std::size_t need = static_cast<std::size_t>(w) * h * 4;
    if (bytes.size() - pos != need) {
        throw IoError("PFM raster size mismatch in '" + path.string() + "'");
    }
    DepthMap depth(w, h);
    const auto* src = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
    for (int row = 0; row < h; ++row) {
        const int y = h - 1 - row;
        for (int x = 0; x < w; ++x) {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b) {
                const int shift = little ? 8 * b : 8 * (3 - b);
                bits |= static_cast<std::uint32_t>(*src++) << shift;
            }
            const float v = std::bit_cast<float>(bits);
            if (!std::isfinite(v)) {
                throw IoError("non-finite depth at (" + std::to_string(x) + ", " + std::to_string(y) +
                              ") in '" + path.string() + "'");
            }
            depth.at(x, y) = v;
        }
    }
    return depth;
}

// ---------------------------------------------------------------------------
// PNG

namespace {

struct PngFile {
    std::FILE* fp = nullptr;
    ~PngFile() {
        if (fp) std::fclose(fp);
    }
};

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    auto* err = static_cast<std::string*>(png_get_error_ptr(png));
    if (err) *err = msg;
    longjmp(png_jmpbuf(png), 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

// Raw decoded image; 8-bit samples for RGB reads, 16-bit for depth reads.
struct DecodedPng {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 0;
    std::vector<unsigned char> rows;  // tightly packed
};

DecodedPng decode_png(const fs::path& path, bool want_rgb8) {
    PngFile file;
    file.fp = std::fopen(path.c_str(), "rb");
    if (!file.fp) throw IoError("cannot open '" + path.string() + "'");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, file.fp) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw IoError("'" + path.string() + "' is not a PNG file");
    }
    std::string err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    DecodedPng out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("corrupt PNG '" + path.string() + "': " + err);
    }
    png_init_io(png, file.fp);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    bool ok = true;
    if (want_rgb8) {
        if (depth == 16) ok = false;
        if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
        if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS)) ok = false;
    } else {
        ok = color == PNG_COLOR_TYPE_GRAY && depth == 16;
    }
    if (ok) {
        png_read_update_info(png, info);
        out.width = static_cast<int>(png_get_image_width(png, info));
        out.height = static_cast<int>(png_get_image_height(png, info));
        out.channels = png_get_channels(png, info);
        out.bit_depth = png_get_bit_depth(png, info);
        const std::size_t stride = png_get_rowbytes(png, info);
        out.rows.resize(stride * out.height);
        std::vector<png_bytep> ptrs(out.height);
        for (int y = 0; y < out.height; ++y) ptrs[y] = out.rows.data() + stride * y;
        png_read_image(png, ptrs.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (!ok) {
        throw IoError("'" + path.string() + "': unsupported PNG layout (" +
                      (want_rgb8 ? std::string("expected 8-bit colour") : std::string("expected 16-bit grayscale")) + ")");
    }
    return out;
}

void encode_png(const fs::path& path, int width, int height, int channels, int bit_depth,
                const std::vector<unsigned char>& packed) {
    PngFile file;
    file.fp = std::fopen(path.c_str(), "wb");
    if (!file.fp) throw IoError("cannot write '" + path.string() + "'");
    std::string err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed for '" + path.string() + "': " + err);
    }
    png_init_io(png, file.fp);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
    for (int y = 0; y < height; ++y) {
        png_write_row(png, const_cast<png_bytep>(packed.data() + stride * y));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

fs::path sidecar_path(const fs::path& png_path) {
    fs::path p = png_path;
    p += ".json";
    return p;
}

void write_depth_png(const DepthMap& depth, const fs::path& path, const QuantSpec& spec) {
    const LevelGrid levels = quantize(depth, spec);
    std::vector<unsigned char> packed(levels.pixel_count() * 2);
    for (std::size_t i = 0; i < levels.pixel_count(); ++i) {
        const auto v = static_cast<std::uint16_t>(levels.storage()[i]);
        packed[2 * i] = static_cast<unsigned char>(v >> 8);  // PNG samples are big-endian
        packed[2 * i + 1] = static_cast<unsigned char>(v & 0xFF);
    }
    encode_png(path, depth.width(), depth.height(), 1, 16, packed);
    const nlohmann::json side = {{"bits", spec.bits}, {"d_min", spec.d_min}, {"d_max", spec.d_max}};
    write_file(sidecar_path(path), side.dump(2) + "\n");
}

DepthMap read_depth_png(const fs::path& path) {
    const fs::path side = sidecar_path(path);
    if (!fs::exists(side)) throw IoError("missing quantization sidecar '" + side.string() + "'");
    QuantSpec spec;
    try {
        const auto j = nlohmann::json::parse(read_file(side));
        for (const auto& [key, _] : j.items()) {
            if (key != "bits" && key != "d_min" && key != "d_max") {
                throw IoError("unknown sidecar field '" + key + "'");
            }
        }
        spec.bits = j.at("bits").get<int>();
        spec.d_min = j.at("d_min").get<double>();
        spec.d_max = j.at("d_max").get<double>();
        spec.validate();
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError("bad sidecar '" + side.string() + "': " + e.what());
    }
    const DecodedPng img = decode_png(path, false);
    LevelGrid levels(img.width, img.height);
    for (std::size_t i = 0; i < levels.pixel_count(); ++i) {
        levels.storage()[i] = (static_cast<std::uint32_t>(img.rows[2 * i]) << 8) | img.rows[2 * i + 1];
    }
    try {
        return dequantize(levels, spec);
    } catch (const std::invalid_argument& e) {
        throw IoError("'" + path.string() + "': " + e.what());
    }
}

DepthMap read_depth(const fs::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".pfm") return read_pfm(path);
    if (ext == ".png") return read_depth_png(path);
    throw IoError("unknown depth format '" + ext + "' for '" + path.string() + "'");
}

void write_depth(const DepthMap& depth, const fs::path& path, DepthFormat format, const QuantSpec& png_spec) {
    if (format == DepthFormat::Pfm) {
        write_pfm(depth, path);
    } else {
        write_depth_png(depth, path, png_spec);
    }
}

RgbImage read_rgb(const fs::path& path) {
    const DecodedPng img = decode_png(path, true);
    RgbImage rgb(img.width, img.height);
    for (std::size_t i = 0; i < rgb.storage().size(); ++i) rgb.storage()[i] = img.rows[i] / 255.0;
    return rgb;
}

void write_rgb(const RgbImage& rgb, const fs::path& path) {
    require_unit_range(rgb);
    std::vector<unsigned char> packed(rgb.storage().size());
    for (std::size_t i = 0; i < packed.size(); ++i) {
        packed[i] = static_cast<unsigned char>(std::lround(rgb.storage()[i] * 255.0));
    }
    encode_png(path, rgb.width(), rgb.height(), 3, 8, packed);
}

}  // namespace depthsr
