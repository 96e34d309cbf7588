#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

namespace glasscav {

/// Midplane complex field sampled on a square pixel grid. grid(ix, iy) with ix along x.
/// Waist-referenced coordinates: u_x = (ix - center_x_px) / w0_px, same for y.
struct ComplexFieldImage {
    Eigen::MatrixXcd grid;
    double pixel_pitch_um = 2.5;
    double center_x_px = 0.0;
    double center_y_px = 0.0;
    double w0_px = 14.0;

    int size() const { return static_cast<int>(grid.rows()); }

    void validate() const;

    double power() const { return grid.squaredNorm(); }

    /// Physical x coordinate (um) of pixel index ix relative to the cavity center.
    double x_um(int ix) const { return (ix - center_x_px) * pixel_pitch_um; }
    double y_um(int iy) const { return (iy - center_y_px) * pixel_pitch_um; }
};

/// Square grid centered at the middle pixel, waist w0_um expressed in pixels.
ComplexFieldImage make_image_grid(int n_px, double pixel_pitch_um, double w0_um);

/// 2x2 block-mean downsampling with the calibration carried along (the processing
/// step applied to camera frames before fitting).
ComplexFieldImage downsample2(const ComplexFieldImage& img);

/// Single-file binary format: 64-byte header (magic "GCFIMG1", nx, ny, pitch, w0_px,
/// center x/y) followed by nx*ny little-endian complex<double>, x index fastest.
void save_field_binary(const ComplexFieldImage& img, const std::string& path);
ComplexFieldImage load_field_binary(const std::string& path);

/// CSV pair <base>.re.csv / <base>.im.csv plus <base>.meta.json with the grid metadata.
void save_field_csv(const ComplexFieldImage& img, const std::string& base_path);
ComplexFieldImage load_field_csv(const std::string& base_path);

}  // namespace glasscav
