#include "edas/idx.hpp"

#include <fstream>
#include <numeric>

#include "edas/errors.hpp"
#include "edas/rng.hpp"

namespace edas {

namespace {

std::uint32_t read_be32(const std::vector<std::uint8_t>& raw, std::size_t at) {
  return (static_cast<std::uint32_t>(raw[at]) << 24) |
         (static_cast<std::uint32_t>(raw[at + 1]) << 16) |
         (static_cast<std::uint32_t>(raw[at + 2]) << 8) |
         static_cast<std::uint32_t>(raw[at + 3]);
}

}  // namespace

IdxData parse_idx_u8(const std::vector<std::uint8_t>& raw,
                     const std::string& origin) {
  if (raw.size() < 4) {
    throw FormatError(origin + ": truncated IDX header (" +
                      std::to_string(raw.size()) + " bytes)");
  }
  if (raw[0] != 0 || raw[1] != 0) {
    throw FormatError(origin + ": bad IDX magic at offset 0");
  }
  if (raw[2] != 0x08) {
    throw FormatError(origin + ": unsupported IDX element type code " +
                      std::to_string(raw[2]) + " at offset 2 (want 8)");
  }
  const unsigned ndims = raw[3];
  if (ndims == 0) {
    throw FormatError(origin + ": IDX dimension count is zero at offset 3");
  }
  const std::size_t header = 4 + 4ul * ndims;
  if (raw.size() < header) {
    throw FormatError(origin + ": truncated IDX dimensions at offset " +
                      std::to_string(raw.size()));
  }
  IdxData data;
  std::size_t payload = 1;
  for (unsigned d = 0; d < ndims; ++d) {
    data.dims.push_back(read_be32(raw, 4 + 4ul * d));
    payload *= data.dims.back();
  }
  if (raw.size() != header + payload) {
    throw FormatError(origin + ": IDX payload is " +
                      std::to_string(raw.size() - header) + " bytes at offset " +
                      std::to_string(header) + ", dimensions require " +
                      std::to_string(payload));
  }
  data.bytes.assign(raw.begin() + static_cast<std::ptrdiff_t>(header),
                    raw.end());
  return data;
}

IdxData load_idx_u8(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open IDX file: " + path);
  }
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("read failure on IDX file: " + path);
  }
  return parse_idx_u8(raw, path);
}

std::vector<LogisticShard> mnist_binary_partition(
    const IdxData& images, const IdxData& labels, int num_agents,
    const MnistPartitionOptions& options) {
  if (num_agents < 1 || options.per_agent < 1) {
    throw ParameterError(
        "mnist_binary_partition: need at least one agent and one sample");
  }
  if (images.dims.size() != 3) {
    throw FormatError("mnist_binary_partition: image file must be 3-d, got " +
                      std::to_string(images.dims.size()) + "-d");
  }
  if (labels.dims.size() != 1) {
    throw FormatError("mnist_binary_partition: label file must be 1-d, got " +
                      std::to_string(labels.dims.size()) + "-d");
  }
  if (images.dims[0] != labels.dims[0]) {
    throw DataError("mnist_binary_partition: " +
                    std::to_string(images.dims[0]) + " images but " +
                    std::to_string(labels.dims[0]) + " labels");
  }

  const std::size_t pixels =
      static_cast<std::size_t>(images.dims[1]) * images.dims[2];
  std::vector<std::size_t> pool;
  for (std::size_t s = 0; s < labels.bytes.size(); ++s) {
    const int digit = labels.bytes[s];
    if (digit == options.digit_positive || digit == options.digit_negative) {
      pool.push_back(s);
    }
  }
  const std::size_t need =
      static_cast<std::size_t>(num_agents) * options.per_agent;
  if (options.disjoint && pool.size() < need) {
    throw DataError("mnist_binary_partition: need " + std::to_string(need) +
                    " samples of digits " +
                    std::to_string(options.digit_positive) + "/" +
                    std::to_string(options.digit_negative) + ", pool has " +
                    std::to_string(pool.size()));
  }
  if (pool.empty()) {
    throw DataError("mnist_binary_partition: no samples of digits " +
                    std::to_string(options.digit_positive) + "/" +
                    std::to_string(options.digit_negative));
  }

  // Seeded Fisher-Yates shuffle of the filtered pool.
  RngStream shuffle(options.seed, rng_domain::kShuffle, 0, 0, 0);
  for (std::size_t i = pool.size(); i > 1; --i) {
    std::swap(pool[i - 1], pool[shuffle.next_index(i)]);
  }

  const auto dim = static_cast<Eigen::Index>(pixels + 1);  // + bias
  std::vector<LogisticShard> shards(static_cast<std::size_t>(num_agents));
  for (int agent = 0; agent < num_agents; ++agent) {
    auto& shard = shards[static_cast<std::size_t>(agent)];
    shard.features.resize(options.per_agent, dim);
    shard.labels.resize(options.per_agent);
    RngStream pick(options.seed, rng_domain::kShuffle, 0,
                   static_cast<std::uint32_t>(agent), 1);
    for (int s = 0; s < options.per_agent; ++s) {
      const std::size_t idx =
          options.disjoint
              ? pool[static_cast<std::size_t>(agent) * options.per_agent + s]
              : pool[pick.next_index(pool.size())];
      const std::uint8_t* px = images.bytes.data() + idx * pixels;
      for (std::size_t d = 0; d < pixels; ++d) {
        shard.features(s, static_cast<Eigen::Index>(d)) = px[d] / 255.0;
      }
      shard.features(s, dim - 1) = 1.0;
      shard.labels(s) = labels.bytes[idx] == options.digit_positive ? 1.0 : -1.0;
    }
  }
  return shards;
}

std::vector<LogisticShard> load_mnist_binary_partition(
    const std::string& images_path, const std::string& labels_path,
    int num_agents, const MnistPartitionOptions& options) {
  return mnist_binary_partition(load_idx_u8(images_path),
                                load_idx_u8(labels_path), num_agents, options);
}

}  // namespace edas
