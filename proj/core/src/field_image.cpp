#include "glasscav/field_image.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "glasscav/io.hpp"

namespace glasscav {

namespace {
constexpr char kMagic[8] = {'G', 'C', 'F', 'I', 'M', 'G', '1', '\0'};
}

void ComplexFieldImage::validate() const {
    if (grid.rows() != grid.cols()) throw std::invalid_argument("field image: grid must be square");
    if (grid.rows() < 2) throw std::invalid_argument("field image: grid too small");
    if (pixel_pitch_um <= 0.0) throw std::invalid_argument("field image: pixel pitch must be positive");
    if (w0_px <= 0.0) throw std::invalid_argument("field image: w0_px must be positive");
}

ComplexFieldImage make_image_grid(int n_px, double pixel_pitch_um, double w0_um) {
    ComplexFieldImage img;
    img.grid = Eigen::MatrixXcd::Zero(n_px, n_px);
    img.pixel_pitch_um = pixel_pitch_um;
    img.center_x_px = n_px / 2.0;
    img.center_y_px = n_px / 2.0;
    img.w0_px = w0_um / pixel_pitch_um;
    img.validate();
    return img;
}

ComplexFieldImage downsample2(const ComplexFieldImage& img) {
    img.validate();
    const int n = img.size();
    if (n % 2 != 0) throw std::invalid_argument("downsample2: grid size must be even");
    ComplexFieldImage out;
    out.grid.resize(n / 2, n / 2);
    for (int iy = 0; iy < n / 2; ++iy)
        for (int ix = 0; ix < n / 2; ++ix)
            out.grid(ix, iy) = 0.25 * (img.grid(2 * ix, 2 * iy) + img.grid(2 * ix + 1, 2 * iy) +
                                       img.grid(2 * ix, 2 * iy + 1) + img.grid(2 * ix + 1, 2 * iy + 1));
    out.pixel_pitch_um = 2.0 * img.pixel_pitch_um;
    out.w0_px = img.w0_px / 2.0;
    out.center_x_px = (img.center_x_px - 0.5) / 2.0;
    out.center_y_px = (img.center_y_px - 0.5) / 2.0;
    return out;
}

void save_field_binary(const ComplexFieldImage& img, const std::string& path) {
    img.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    char header[64] = {};
    std::memcpy(header, kMagic, 8);
    const std::uint32_t nx = static_cast<std::uint32_t>(img.grid.rows());
    const std::uint32_t ny = static_cast<std::uint32_t>(img.grid.cols());
    std::memcpy(header + 8, &nx, 4);
    std::memcpy(header + 12, &ny, 4);
    std::memcpy(header + 16, &img.pixel_pitch_um, 8);
    std::memcpy(header + 24, &img.w0_px, 8);
    std::memcpy(header + 32, &img.center_x_px, 8);
    std::memcpy(header + 40, &img.center_y_px, 8);
    out.write(header, 64);
    out.write(reinterpret_cast<const char*>(img.grid.data()),
              static_cast<std::streamsize>(sizeof(std::complex<double>)) * nx * ny);
    if (!out) throw std::runtime_error("write failed: " + path);
}

ComplexFieldImage load_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char header[64];
    in.read(header, 64);
    if (!in || std::memcmp(header, kMagic, 8) != 0)
        throw std::runtime_error("not a field-image file: " + path);
    std::uint32_t nx = 0, ny = 0;
    std::memcpy(&nx, header + 8, 4);
    std::memcpy(&ny, header + 12, 4);
    ComplexFieldImage img;
    std::memcpy(&img.pixel_pitch_um, header + 16, 8);
    std::memcpy(&img.w0_px, header + 24, 8);
    std::memcpy(&img.center_x_px, header + 32, 8);
    std::memcpy(&img.center_y_px, header + 40, 8);
    img.grid.resize(nx, ny);
    in.read(reinterpret_cast<char*>(img.grid.data()),
            static_cast<std::streamsize>(sizeof(std::complex<double>)) * nx * ny);
    if (!in) throw std::runtime_error("truncated field-image file: " + path);
    img.validate();
    return img;
}

void save_field_csv(const ComplexFieldImage& img, const std::string& base_path) {
    img.validate();
    write_csv_matrix(img.grid.real(), base_path + ".re.csv");
    write_csv_matrix(img.grid.imag(), base_path + ".im.csv");
    nlohmann::json meta;
    meta["pixel_pitch_um"] = img.pixel_pitch_um;
    meta["w0_px"] = img.w0_px;
    meta["center_x_px"] = img.center_x_px;
    meta["center_y_px"] = img.center_y_px;
    write_text_file(base_path + ".meta.json", meta.dump(2) + "\n");
}

ComplexFieldImage load_field_csv(const std::string& base_path) {
    const Eigen::MatrixXd re = read_csv_matrix(base_path + ".re.csv");
    const Eigen::MatrixXd im = read_csv_matrix(base_path + ".im.csv");
    if (re.rows() != im.rows() || re.cols() != im.cols())
        throw std::runtime_error("field CSV pair shape mismatch: " + base_path);
    const auto meta = nlohmann::json::parse(read_text_file(base_path + ".meta.json"));
    ComplexFieldImage img;
    img.grid = re.cast<std::complex<double>>() +
               std::complex<double>(0.0, 1.0) * im.cast<std::complex<double>>();
    img.pixel_pitch_um = meta.at("pixel_pitch_um").get<double>();
    img.w0_px = meta.at("w0_px").get<double>();
    img.center_x_px = meta.at("center_x_px").get<double>();
    img.center_y_px = meta.at("center_y_px").get<double>();
    img.validate();
    return img;
}

}  // namespace glasscav
