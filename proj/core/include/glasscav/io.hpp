#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace glasscav {

/// Shortest round-trip decimal representation of a double ("%.17g" trimmed).
std::string format_double(double v);

/// CSV with one matrix row per line; values formatted round-trip exact.
void write_csv_matrix(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd read_csv_matrix(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_file_hex(const std::string& path);

}  // namespace glasscav
