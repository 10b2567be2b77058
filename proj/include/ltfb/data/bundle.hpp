// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "ltfb/core/binio.hpp"
#include "ltfb/data/sample.hpp"
#include "ltfb/nn/tensor.hpp"

// Multi-sample bundle files ("LBDS"): header {magic, version, sample_count,
// ModalityDims}, then sample_count fixed-stride records of little-endian
// float32 (inputs first, then outputs). Samples are stored in generation
// order, so file-order batches are not representative of the dataset; that
// is exactly why the epoch shuffle exists.

namespace ltfb::data {

inline constexpr char kBundleMagic[4] = {'L', 'B', 'D', 'S'};
inline constexpr std::uint32_t kBundleVersion = 1;
inline constexpr std::size_t kBundleHeaderBytes = 4 + 4 + 4 + 7 * 4;

struct BundleHeader {
  std::uint32_t version = kBundleVersion;
  std::uint32_t sample_count = 0;
  surrogate::ModalityDims dims;

  std::size_t stride_floats() const { return dims.record_floats(); }
  std::size_t stride_bytes() const { return stride_floats() * 4; }
};

inline BundleHeader read_bundle_header(std::istream& is,
                                       const std::string& path) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != std::string(kBundleMagic, 4))
    throw IoError("not a bundle file (bad magic): " + path);
  BundleHeader h;
  h.version = get_u32(is, path);
  if (h.version != kBundleVersion)
    throw IoError("unsupported bundle version in " + path);
  h.sample_count = get_u32(is, path);
  h.dims.input_dim = get_u32(is, path);
  h.dims.latent_dim = get_u32(is, path);
  h.dims.scalar_dim = get_u32(is, path);
  h.dims.image_views = get_u32(is, path);
  h.dims.image_channels = get_u32(is, path);
  h.dims.image_h = get_u32(is, path);
  h.dims.image_w = get_u32(is, path);
  h.dims.validate();
  return h;
}

inline void write_bundle(const std::filesystem::path& path,
                         const surrogate::ModalityDims& dims,
                         std::span<const SampleRecord> records) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os.write(kBundleMagic, 4);
    put_u32(os, kBundleVersion);
    put_u32(os, static_cast<std::uint32_t>(records.size()));
    put_u32(os, dims.input_dim);
    put_u32(os, dims.latent_dim);
    put_u32(os, dims.scalar_dim);
    put_u32(os, dims.image_views);
    put_u32(os, dims.image_channels);
    put_u32(os, dims.image_h);
    put_u32(os, dims.image_w);
    for (const SampleRecord& rec : records) {
      if (!rec.matches(dims))
        throw ContractError("sample record does not match the bundle dims");
      for (float v : rec.inputs) put_f32(os, v);
      for (float v : rec.outputs) put_f32(os, v);
    }
    if (!os) throw IoError("write failure on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw IoError("cannot move bundle into place at " + path.string() + ": " +
                  ec.message());
}

/// Splits a dataset into ceil(N / samples_per_file) bundle files named
/// bundle_00000.lbds, bundle_00001.lbds, ... under out_dir.
inline std::vector<std::filesystem::path> write_bundles(
    std::span<const SampleRecord> records, const surrogate::ModalityDims& dims,
    std::size_t samples_per_file, const std::filesystem::path& out_dir) {
  if (samples_per_file < 1)
    throw ContractError("write_bundles: samples_per_file must be >= 1");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::vector<std::filesystem::path> paths;
  std::size_t file_idx = 0;
  for (std::size_t begin = 0; begin < records.size();
       begin += samples_per_file, ++file_idx) {
    const std::size_t end =
        std::min(records.size(), begin + samples_per_file);
    char name[32];
    std::snprintf(name, sizeof(name), "bundle_%05zu.lbds", file_idx);
    const std::filesystem::path path = out_dir / name;
    write_bundle(path, dims, records.subspan(begin, end - begin));
    paths.push_back(path);
  }
  return paths;
}

inline std::vector<SampleRecord> read_all_records(
    const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open bundle " + path.string());
  const BundleHeader h = read_bundle_header(is, path.string());
  std::vector<SampleRecord> records(h.sample_count);
  for (SampleRecord& rec : records) {
    rec.inputs.resize(h.dims.input_dim);
    rec.outputs.resize(h.dims.output_dim());
    for (float& v : rec.inputs) v = get_f32(is, path.string());
    for (float& v : rec.outputs) v = get_f32(is, path.string());
  }
  return records;
}

/// Metadata over a directory of bundle files: per-file sample counts and the
/// global id ranges they cover. Global sample ids follow file order, which
/// is generation order.
struct DatasetIndex {
  surrogate::ModalityDims dims;
  std::vector<std::filesystem::path> paths;
  std::vector<std::uint32_t> counts;
  std::vector<SampleId> bases;  // first global id in each file
  std::size_t total = 0;

  std::size_t stride_floats() const { return dims.record_floats(); }
  std::size_t stride_bytes() const { return stride_floats() * 4; }

  struct Location {
    std::size_t file_idx;
    std::uint32_t record_idx;
  };

  Location locate(SampleId id) const {
    if (id >= total)
      throw ContractError("sample id " + std::to_string(id) +
                          " outside dataset of " + std::to_string(total));
    // bases is sorted; binary search for the containing file.
    auto it = std::upper_bound(bases.begin(), bases.end(), id);
    const std::size_t file_idx =
        static_cast<std::size_t>(it - bases.begin()) - 1;
    return {file_idx, static_cast<std::uint32_t>(id - bases[file_idx])};
  }

  static DatasetIndex scan(const std::vector<std::filesystem::path>& files) {
    if (files.empty()) throw IoError("dataset scan: no bundle files given");
    DatasetIndex index;
    bool first = true;
    for (const auto& path : files) {
      std::ifstream is(path, std::ios::binary);
      if (!is) throw IoError("cannot open bundle " + path.string());
      const BundleHeader h = read_bundle_header(is, path.string());
      if (first) {
        index.dims = h.dims;
        first = false;
      } else if (!(h.dims == index.dims)) {
        throw IoError("bundle dims mismatch in " + path.string());
      }
      index.paths.push_back(path);
      index.counts.push_back(h.sample_count);
      index.bases.push_back(static_cast<SampleId>(index.total));
      index.total += h.sample_count;
    }
    return index;
  }

  static DatasetIndex scan_dir(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
      if (entry.path().extension() == ".lbds") files.push_back(entry.path());
    if (ec) throw IoError("cannot list dataset directory " + dir.string());
    if (files.empty())
      throw IoError("no .lbds bundle files under " + dir.string());
    std::sort(files.begin(), files.end());
    return scan(files);
  }
};

/// Reads the given samples once, bypassing any data store, and assembles
/// them into (inputs, outputs) batch tensors. Used for validation and
/// tournament slices, which are read a single time and then held immutable.
inline std::pair<nn::Tensor<float>, nn::Tensor<float>> assemble_tensors(
    const DatasetIndex& index, std::span<const SampleId> ids) {
  nn::Tensor<float> x({ids.size(), index.dims.input_dim});
  nn::Tensor<float> y({ids.size(), index.dims.output_dim()});
  std::ifstream is;
  std::size_t open_file = static_cast<std::size_t>(-1);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto loc = index.locate(ids[r]);
    if (loc.file_idx != open_file) {
      is.close();
      is.clear();
      is.open(index.paths[loc.file_idx], std::ios::binary);
      if (!is)
        throw IoError("cannot open bundle " +
                      index.paths[loc.file_idx].string());
      open_file = loc.file_idx;
    }
    is.seekg(static_cast<std::streamoff>(
        kBundleHeaderBytes + loc.record_idx * index.stride_bytes()));
    const std::string ctx = index.paths[loc.file_idx].string();
    for (std::uint32_t c = 0; c < index.dims.input_dim; ++c)
      x(r, c) = get_f32(is, ctx);
    for (std::uint32_t c = 0; c < index.dims.output_dim(); ++c)
      y(r, c) = get_f32(is, ctx);
  }
  return {std::move(x), std::move(y)};
}

}  // namespace ltfb::data
