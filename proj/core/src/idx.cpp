#include <zlib.h>

#include <fstream>

#include "spinal/data.hpp"
#include "spinal/errors.hpp"

namespace spinal {

namespace {

// gzread passes uncompressed files through unchanged.
std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw ParseError(path.string() + ": cannot open");
  std::vector<std::uint8_t> bytes;
  std::uint8_t buf[1 << 16];
  int n = 0;
  while ((n = gzread(f, buf, sizeof buf)) > 0) bytes.insert(bytes.end(), buf, buf + n);
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw ParseError(path.string() + ": read error");
  return bytes;
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) | (std::uint32_t{b[off + 2]} << 8) |
         std::uint32_t{b[off + 3]};
}

void put_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  b.push_back(static_cast<std::uint8_t>(v >> 24));
  b.push_back(static_cast<std::uint8_t>(v >> 16));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
  b.push_back(static_cast<std::uint8_t>(v));
}

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

void write_all(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.extension() == ".gz") {
    gzFile f = gzopen(path.c_str(), "wb");
    if (f == nullptr) throw ParseError(path.string() + ": cannot open for writing");
    const int n = gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
    gzclose(f);
    if (n != static_cast<int>(bytes.size())) throw ParseError(path.string() + ": write error");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ParseError(path.string() + ": write error");
}

}  // namespace

IdxImages read_idx_images(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  if (bytes.size() < 16) throw TruncatedFileError(path.string() + ": truncated header");
  const auto magic = be32(bytes, 0);
  if (magic != kIdxImagesMagic) {
    throw BadMagicError(path.string() + ": bad magic " + hex(magic) + ", expected " + hex(kIdxImagesMagic));
  }
  IdxImages img;
  img.count = be32(bytes, 4);
  img.rows = be32(bytes, 8);
  img.cols = be32(bytes, 12);
  const std::size_t expected = img.count * img.rows * img.cols;
  if (bytes.size() - 16 < expected) {
    throw TruncatedFileError(path.string() + ": truncated payload, " + std::to_string(bytes.size() - 16) + " of " +
                     std::to_string(expected) + " bytes");
  }
  img.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(expected));
  return img;
}

std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  if (bytes.size() < 8) throw TruncatedFileError(path.string() + ": truncated header");
  const auto magic = be32(bytes, 0);
  if (magic != kIdxLabelsMagic) {
    throw BadMagicError(path.string() + ": bad magic " + hex(magic) + ", expected " + hex(kIdxLabelsMagic));
  }
  const std::size_t count = be32(bytes, 4);
  if (bytes.size() - 8 < count) {
    throw TruncatedFileError(path.string() + ": truncated payload, " + std::to_string(bytes.size() - 8) + " of " +
                     std::to_string(count) + " labels");
  }
  return {bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count)};
}

void write_idx_images(const std::filesystem::path& path, const IdxImages& images) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(16 + images.pixels.size());
  put_be32(bytes, kIdxImagesMagic);
  put_be32(bytes, static_cast<std::uint32_t>(images.count));
  put_be32(bytes, static_cast<std::uint32_t>(images.rows));
  put_be32(bytes, static_cast<std::uint32_t>(images.cols));
  bytes.insert(bytes.end(), images.pixels.begin(), images.pixels.end());
  write_all(path, bytes);
}

void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(8 + labels.size());
  put_be32(bytes, kIdxLabelsMagic);
  put_be32(bytes, static_cast<std::uint32_t>(labels.size()));
  bytes.insert(bytes.end(), labels.begin(), labels.end());
  write_all(path, bytes);
}

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path, Split split,
                 std::size_t num_classes) {
  const auto images = read_idx_images(images_path);
  const auto labels = read_idx_labels(labels_path);
  if (labels.size() != images.count) {
    throw CountMismatchError(labels_path.string() + ": count mismatch, " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(images.count) + " images in " + images_path.string());
  }
  if (images.count == 0) throw ParseError(images_path.string() + ": no images");
  std::vector<double> pixels(images.pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = images.pixels[i] / 255.0;
  std::vector<double> targets(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes) {
      throw ParseError(labels_path.string() + ": label " + std::to_string(labels[i]) + " at index " + std::to_string(i) +
                       " exceeds class count " + std::to_string(num_classes));
    }
    targets[i] = labels[i];
  }
  return Dataset{Tensor({images.count, 1, images.rows, images.cols}, std::move(pixels)),
                 Tensor({labels.size()}, std::move(targets)), split, num_classes};
}

IdxPaths mnist_paths(const std::filesystem::path& dir) {
  auto pick = [&](const std::string& stem) {
    const auto plain = dir / stem;
    if (std::filesystem::exists(plain)) return plain;
    const auto gz = dir / (stem + ".gz");
    if (std::filesystem::exists(gz)) return gz;
    return plain;
  };
  return {pick("train-images-idx3-ubyte"), pick("train-labels-idx1-ubyte"), pick("t10k-images-idx3-ubyte"),
          pick("t10k-labels-idx1-ubyte")};
}

}  // namespace spinal
