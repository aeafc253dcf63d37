#include "core/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "core/error.hpp"

namespace eegsz {

namespace {

double bilinear_sample(const Matrix& m, double r, double c) {
    const size_t r0 = static_cast<size_t>(r);
    const size_t c0 = static_cast<size_t>(c);
    const size_t r1 = std::min(r0 + 1, m.rows() - 1);
    const size_t c1 = std::min(c0 + 1, m.cols() - 1);
    const double fr = r - static_cast<double>(r0);
    const double fc = c - static_cast<double>(c0);
    const double top = m(r0, c0) * (1.0 - fc) + m(r0, c1) * fc;
    const double bot = m(r1, c0) * (1.0 - fc) + m(r1, c1) * fc;
    return top * (1.0 - fr) + bot * fr;
}

void put_u32_be(std::vector<uint8_t>& v, uint32_t x) {
    v.push_back(static_cast<uint8_t>(x >> 24));
    v.push_back(static_cast<uint8_t>(x >> 16));
    v.push_back(static_cast<uint8_t>(x >> 8));
    v.push_back(static_cast<uint8_t>(x));
}

void append_chunk(std::vector<uint8_t>& out, const char type[4],
                  const std::vector<uint8_t>& payload) {
    put_u32_be(out, static_cast<uint32_t>(payload.size()));
    const size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const uint32_t crc = static_cast<uint32_t>(
        ::crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start)));
    put_u32_be(out, crc);
}

// 4x6 digit glyphs, plus '.', '-', '%'
const uint8_t kGlyphs[13][6] = {
    {0b0110, 0b1001, 0b1001, 0b1001, 0b1001, 0b0110},  // 0
    {0b0010, 0b0110, 0b0010, 0b0010, 0b0010, 0b0111},  // 1
    {0b0110, 0b1001, 0b0001, 0b0110, 0b1000, 0b1111},  // 2
    {0b1110, 0b0001, 0b0110, 0b0001, 0b0001, 0b1110},  // 3
    {0b1001, 0b1001, 0b1111, 0b0001, 0b0001, 0b0001},  // 4
    {0b1111, 0b1000, 0b1110, 0b0001, 0b0001, 0b1110},  // 5
    {0b0110, 0b1000, 0b1110, 0b1001, 0b1001, 0b0110},  // 6
    {0b1111, 0b0001, 0b0010, 0b0010, 0b0100, 0b0100},  // 7
    {0b0110, 0b1001, 0b0110, 0b1001, 0b1001, 0b0110},  // 8
    {0b0110, 0b1001, 0b1001, 0b0111, 0b0001, 0b0110},  // 9
    {0b0000, 0b0000, 0b0000, 0b0000, 0b0000, 0b0010},  // .
    {0b0000, 0b0000, 0b1111, 0b0000, 0b0000, 0b0000},  // -
    {0b1001, 0b0010, 0b0010, 0b0100, 0b0100, 0b1001},  // %
};

void draw_glyph(GrayImage& img, size_t row, size_t col, int glyph, uint8_t shade) {
    if (glyph < 0 || glyph > 12) return;
    for (size_t r = 0; r < 6; ++r) {
        for (size_t c = 0; c < 4; ++c) {
            if ((kGlyphs[glyph][r] >> (3 - c)) & 1) {
                const size_t rr = row + r, cc = col + c;
                if (rr < img.height && cc < img.width) img.at(rr, cc) = shade;
            }
        }
    }
}

} // namespace

GrayImage render_tf_image(const Matrix& magnitudes, size_t out_w, size_t out_h,
                          IntensityScale scale, bool rows_ascend_in_frequency) {
    if (out_w < 8 || out_h < 8) throw_config("render: output dimensions must be >= 8 pixels");
    if (magnitudes.rows() == 0 || magnitudes.cols() == 0) {
        throw_config("render: empty magnitude matrix");
    }

    Matrix scaled(magnitudes.rows(), magnitudes.cols());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (size_t r = 0; r < magnitudes.rows(); ++r) {
        for (size_t c = 0; c < magnitudes.cols(); ++c) {
            double v = magnitudes(r, c);
            if (scale == IntensityScale::Log) v = std::log1p(v);
            scaled(r, c) = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double range = hi - lo;
    if (range > 0.0) {
        for (auto& v : scaled.data()) v = (v - lo) / range * 255.0;
    } else {
        for (auto& v : scaled.data()) v = 0.0;  // degenerate range maps to black
    }

    GrayImage img(out_w, out_h);
    const double rstep = (scaled.rows() > 1 && out_h > 1)
        ? static_cast<double>(scaled.rows() - 1) / static_cast<double>(out_h - 1) : 0.0;
    const double cstep = (scaled.cols() > 1 && out_w > 1)
        ? static_cast<double>(scaled.cols() - 1) / static_cast<double>(out_w - 1) : 0.0;
    for (size_t r = 0; r < out_h; ++r) {
        // top image row must hold the highest frequency
        const size_t src_r = rows_ascend_in_frequency ? (out_h - 1 - r) : r;
        for (size_t c = 0; c < out_w; ++c) {
            const double v = bilinear_sample(scaled, static_cast<double>(src_r) * rstep,
                                             static_cast<double>(c) * cstep);
            img.at(r, c) = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
        }
    }
    return img;
}

void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write image: " + path);
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
}

void write_png(const GrayImage& img, const std::string& path) {
    // raw scanlines with filter byte 0
    std::vector<uint8_t> raw;
    raw.reserve((img.width + 1) * img.height);
    for (size_t r = 0; r < img.height; ++r) {
        raw.push_back(0);
        raw.insert(raw.end(), img.pixels.begin() + static_cast<std::ptrdiff_t>(r * img.width),
                   img.pixels.begin() + static_cast<std::ptrdiff_t>((r + 1) * img.width));
    }
    uLongf comp_cap = compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> comp(comp_cap);
    if (compress2(comp.data(), &comp_cap, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
        throw_data("png: zlib compression failed");
    }
    comp.resize(comp_cap);

    std::vector<uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<uint8_t> ihdr;
    put_u32_be(ihdr, static_cast<uint32_t>(img.width));
    put_u32_be(ihdr, static_cast<uint32_t>(img.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // no interlace
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", comp);
    append_chunk(out, "IEND", {});

    std::ofstream f(path, std::ios::binary);
    if (!f) throw_data("cannot write image: " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

void write_image(const GrayImage& img, const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".png") == 0) {
        write_png(img, path);
    } else {
        write_pgm(img, path);
    }
}

void draw_number(GrayImage& img, size_t row, size_t col, double value, uint8_t shade) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", value);
    size_t x = col;
    for (const char* p = buf; *p; ++p) {
        int glyph = -1;
        if (*p >= '0' && *p <= '9') glyph = *p - '0';
        else if (*p == '.') glyph = 10;
        else if (*p == '-') glyph = 11;
        else if (*p == '%') glyph = 12;
        if (glyph >= 0) draw_glyph(img, row, x, glyph, shade);
        x += 5;
    }
}

GrayImage plot_line(const std::vector<double>& xs, const std::vector<double>& ys,
                    size_t width, size_t height) {
    GrayImage img(width, height, 255);
    if (xs.empty() || xs.size() != ys.size()) return img;
    const size_t ml = 40, mb = 24, mt = 10, mr = 10;
    const size_t x0 = ml, x1 = width - mr, y0 = mt, y1 = height - mb;
    for (size_t x = x0; x <= x1; ++x) { img.at(y1, x) = 0; img.at(y0, x) = 180; }
    for (size_t y = y0; y <= y1; ++y) { img.at(y, x0) = 0; img.at(y, x1) = 180; }

    double xmin = xs[0], xmax = xs[0], ymin = ys[0], ymax = ys[0];
    for (size_t i = 0; i < xs.size(); ++i) {
        xmin = std::min(xmin, xs[i]); xmax = std::max(xmax, xs[i]);
        ymin = std::min(ymin, ys[i]); ymax = std::max(ymax, ys[i]);
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    auto px = [&](double x) {
        return x0 + static_cast<size_t>((x - xmin) / (xmax - xmin)
                                        * static_cast<double>(x1 - x0));
    };
    auto py = [&](double y) {
        return y1 - static_cast<size_t>((y - ymin) / (ymax - ymin)
                                        * static_cast<double>(y1 - y0));
    };
    for (size_t i = 1; i < xs.size(); ++i) {
        // Bresenham-ish dense stepping
        const double ax = static_cast<double>(px(xs[i - 1])), ay = static_cast<double>(py(ys[i - 1]));
        const double bx = static_cast<double>(px(xs[i])), by = static_cast<double>(py(ys[i]));
        const int steps = static_cast<int>(std::max(std::abs(bx - ax), std::abs(by - ay))) + 1;
        for (int s = 0; s <= steps; ++s) {
            const double t = static_cast<double>(s) / static_cast<double>(steps);
            const size_t x = static_cast<size_t>(ax + (bx - ax) * t);
            const size_t y = static_cast<size_t>(ay + (by - ay) * t);
            if (x < width && y < height) img.at(y, x) = 0;
        }
    }
    draw_number(img, y1 + 8, x0, xmin, 0);
    draw_number(img, y1 + 8, x1 - 30, xmax, 0);
    draw_number(img, y1 - 3, 2, ymin, 0);
    draw_number(img, y0, 2, ymax, 0);
    return img;
}

GrayImage plot_confusion(double tp, double fp, double tn, double fn, size_t cell) {
    // 2x2 heatmap; rows = actual (HC=1 top), cols = predicted
    const size_t margin = 30;
    GrayImage img(margin + 2 * cell + 10, margin + 2 * cell + 10, 255);
    const double counts[2][2] = {{tp, fn}, {fp, tn}};
    double maxc = 1.0;
    for (auto& row : counts) for (double v : row) maxc = std::max(maxc, v);
    for (size_t r = 0; r < 2; ++r) {
        for (size_t c = 0; c < 2; ++c) {
            const uint8_t shade = static_cast<uint8_t>(
                230.0 - 180.0 * (counts[r][c] / maxc));
            for (size_t y = 0; y < cell; ++y) {
                for (size_t x = 0; x < cell; ++x) {
                    img.at(margin + r * cell + y, margin + c * cell + x) = shade;
                }
            }
            draw_number(img, margin + r * cell + cell / 2,
                        margin + c * cell + cell / 3, counts[r][c],
                        shade > 128 ? 0 : 255);
        }
    }
    // grid
    for (size_t i = 0; i <= 2; ++i) {
        for (size_t x = 0; x <= 2 * cell; ++x) img.at(margin + i * cell, margin + x) = 0;
        for (size_t y = 0; y <= 2 * cell; ++y) img.at(margin + y, margin + i * cell) = 0;
    }
    draw_number(img, 10, margin, 1, 0);
    draw_number(img, 10, margin + cell, 0, 0);
    draw_number(img, margin, 5, 1, 0);
    draw_number(img, margin + cell, 5, 0, 0);
    return img;
}

} // namespace eegsz
