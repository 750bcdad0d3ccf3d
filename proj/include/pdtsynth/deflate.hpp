#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "pdtsynth/error.hpp"

namespace pdt {

/// Size in bytes of the raw DEFLATE stream (no zlib/gzip container) for `data`.
inline std::size_t deflate_size(std::string_view data, int level = 6) {
  z_stream zs{};
  if (deflateInit2(&zs, level, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw Error(ErrorCode::IoError, "deflateInit2 failed");
  std::vector<unsigned char> buf(deflateBound(&zs, static_cast<uLong>(data.size())));
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = buf.data();
  zs.avail_out = static_cast<uInt>(buf.size());
  const int rc = deflate(&zs, Z_FINISH);
  const std::size_t out = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorCode::IoError, "deflate did not finish");
  return out;
}

/// Uncompressed over compressed byte length.
inline double compression_ratio_of(std::string_view data) {
  return static_cast<double>(data.size()) / static_cast<double>(deflate_size(data));
}

}  // namespace pdt
