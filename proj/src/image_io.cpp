#include <fstream>
#include <iterator>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "stripid/imaging.hpp"

namespace stripid {

namespace {

enum class Container { Png, Jpeg, Bmp, Unknown };

Container sniff(const std::vector<unsigned char>& bytes) {
  auto starts_with = [&](std::initializer_list<unsigned char> magic) {
    return bytes.size() >= magic.size() && std::equal(magic.begin(), magic.end(), bytes.begin());
  };
  if (starts_with({0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A})) return Container::Png;
  if (starts_with({0xFF, 0xD8, 0xFF})) return Container::Jpeg;
  if (starts_with({'B', 'M'})) return Container::Bmp;
  return Container::Unknown;
}

cv::Mat to_bgr_mat(const Image& img) {
  cv::Mat mat(img.height(), img.width(), CV_8UC3);
  for (int row = 0; row < img.height(); ++row) {
    auto* dst = mat.ptr<cv::Vec3b>(row);
    for (int col = 0; col < img.width(); ++col) {
      const Rgb& p = img.at(row, col);
      dst[col] = cv::Vec3b(p.b, p.g, p.r);
    }
  }
  return mat;
}

void encode_to(const Image& img, const std::filesystem::path& path, const std::string& ext,
               const std::vector<int>& params) {
  std::vector<unsigned char> buffer;
  try {
    if (!cv::imencode(ext, to_bgr_mat(img), buffer, params)) {
      throw Error(ErrorCode::Io, "encoder rejected image for " + path.string());
    }
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::Io, "cannot encode " + path.string() + ": " + e.what());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  if (sniff(bytes) == Container::Unknown) {
    throw Error(ErrorCode::UnsupportedFormat, path.string());
  }

  cv::Mat mat;
  try {
    mat = cv::imdecode(bytes, cv::IMREAD_COLOR);
  } catch (const cv::Exception&) {
    mat.release();
  }
  if (mat.empty() || mat.type() != CV_8UC3) {
    throw Error(ErrorCode::CorruptImage, path.string());
  }

  Image img(mat.cols, mat.rows);
  for (int row = 0; row < mat.rows; ++row) {
    const auto* src = mat.ptr<cv::Vec3b>(row);
    for (int col = 0; col < mat.cols; ++col) {
      img.at(row, col) = {src[col][2], src[col][1], src[col][0]};
    }
  }
  return img;
}

void save_png(const Image& img, const std::filesystem::path& path) {
  encode_to(img, path, ".png", {cv::IMWRITE_PNG_COMPRESSION, 6});
}

void save_bmp(const Image& img, const std::filesystem::path& path) {
  encode_to(img, path, ".bmp", {});
}

}  // namespace stripid
