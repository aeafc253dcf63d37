#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace eegsz {

struct GrayImage {
    size_t width = 0;
    size_t height = 0;
    std::vector<uint8_t> pixels;  // row-major, row 0 at the top

    GrayImage() = default;
    GrayImage(size_t w, size_t h, uint8_t fill = 0)
        : width(w), height(h), pixels(w * h, fill) {}

    uint8_t& at(size_t row, size_t col) { return pixels[row * width + col]; }
    uint8_t at(size_t row, size_t col) const { return pixels[row * width + col]; }
};

enum class IntensityScale { Linear, Log };

/// Min-max scales the magnitudes to [0,255] (optionally log(1+m) first),
/// bilinearly resamples to out_h x out_w and orients the image so frequency
/// ascends upward. `rows_ascend_in_frequency` describes the input matrix:
/// spectrograms store the DC bin in row 0 (true), scalograms store the
/// highest frequency in row 0 (false).
GrayImage render_tf_image(const Matrix& magnitudes, size_t out_w, size_t out_h,
                          IntensityScale scale, bool rows_ascend_in_frequency);

void write_pgm(const GrayImage& img, const std::string& path);
void write_png(const GrayImage& img, const std::string& path);

/// Dispatches on the file extension (.png vs anything else = PGM).
void write_image(const GrayImage& img, const std::string& path);

// Minimal raster plotting used by the CLI outputs (axes and labels burned
// into the image; digits only).
GrayImage plot_line(const std::vector<double>& xs, const std::vector<double>& ys,
                    size_t width = 480, size_t height = 320);
GrayImage plot_confusion(double tp, double fp, double tn, double fn,
                         size_t cell = 96);
void draw_number(GrayImage& img, size_t row, size_t col, double value, uint8_t shade);

} // namespace eegsz
